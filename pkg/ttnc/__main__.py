from ttnc.commands import app

app(prog_name="ttnc")
