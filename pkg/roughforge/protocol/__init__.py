"""
roughforge Document Formats

JSON documents for dual elements, group paths and Hölder families, and the
CSV/JSON file transport used by the command line.
"""
