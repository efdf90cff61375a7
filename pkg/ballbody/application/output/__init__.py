"""Output ports"""
