from app.commands.analysis import analyze_command
from app.commands.experiments import run_command, sweep_command
from app.commands.traces import gen_traces_command

__all__ = ["analyze_command", "gen_traces_command", "run_command", "sweep_command"]
