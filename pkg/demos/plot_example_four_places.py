"""
A local-global failure at four places
=====================================

Reproduce the D6 scenario in which an embedding exists at every place but
no single orientation works everywhere.
"""

##############################################################################
# The report lists, for each candidate global orientation, whether the
# embedding exists at each place.

from torus_lgp.cli import main, reproduce_example_2_13

rep = reproduce_example_2_13()
print("type:", rep["type"])
for row in rep["orientations"]:
    print(row["name"], row["verdicts"])
print("local embedding exists:", rep["local_exists"])
print("verdict:", rep["verdict"])

##############################################################################
# The distinguished simple roots of the local group at each place:

for place, roots in rep["distinguished_roots"].items():
    print(place, roots)

##############################################################################
# The same table from the command line.

main(["--format", "text", "example-2-13"])
