"""Poisson suspension: entropy bounds, seeded sampling and statistical checks"""
