"""Pipeline 测试模块"""
