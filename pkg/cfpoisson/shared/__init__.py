"""Shared utilities: errors, random streams, file formats and process pools"""
