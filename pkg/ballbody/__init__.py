"""Toolkit de cuerpos de bolas"""
