"""Input ports"""
