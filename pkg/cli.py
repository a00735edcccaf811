# cli.py
"""
Точка входа: python cli.py <команда>.
Команды: compile, bench-fidelity, bench-depth, verify overlap|shots|noise.
"""
from dotenv import load_dotenv

from ttnc.commands import app

load_dotenv()


if __name__ == "__main__":
    app(prog_name="ttnc")
