"""Port package"""
