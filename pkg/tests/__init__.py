"""
测试套件

按模块分目录：geometry / flow / conley / thicken / homology / minimax / pipeline / cli
"""
