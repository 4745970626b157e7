from deltaqed.cli import _entry

_entry()
