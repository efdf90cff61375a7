"""Service package"""
