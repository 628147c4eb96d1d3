#!/usr/bin/env python3
"""Embed a Joe-Kuo direction-number text file as a C++ raw string header."""
import sys

src = sys.argv[1] if len(sys.argv) > 1 else "data/new-joe-kuo-1024.txt"
dst = sys.argv[2] if len(sys.argv) > 2 else "include/tsqmc/joe_kuo_1024.hpp"
txt = open(src).read()
with open(dst, "w") as out:
    out.write("// Generated from data/new-joe-kuo-1024.txt (Joe-Kuo \"new-joe-kuo-6.21201\" table,\n")
    out.write("// dimensions 2..1024). Regenerate with tools/embed_direction_numbers.py.\n")
    out.write("#pragma once\n\nnamespace tsqmc::detail {\n\n")
    out.write('inline constexpr const char* kJoeKuo1024 = R"JK(\n')
    out.write(txt)
    out.write(')JK";\n\n} // namespace tsqmc::detail\n')
