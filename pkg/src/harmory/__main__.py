from harmory.cli import entry

entry()
