from compauction.cli import entry

entry()
