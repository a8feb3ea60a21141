"""命令行入口：conley-kit <subcommand> [flags]"""
