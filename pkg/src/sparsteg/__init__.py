"""Blind multi-image steganography by block-DCT sparse approximation."""
