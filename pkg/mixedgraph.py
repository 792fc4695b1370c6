"""
Transductive binary classification on graphs with similar and dissimilar edges.

    python mixedgraph.py gen-g50c --seed 0 -o features.csv -o labels.tsv
    python mixedgraph.py build-knn --features features.csv --k 50 -o edges.tsv
    python mixedgraph.py split-mixed --edges edges.tsv --labels labels.tsv --labeled labeled.txt --p 10 -o mixed.tsv
    python mixedgraph.py run --method ir-mg --mixed mixed.tsv --labels labels.tsv --labeled labeled.txt --gamma nac -o posterior.csv
    python mixedgraph.py evaluate --spec experiment.json -o report.json
"""
import sys
from mixedgraph import cli


if __name__ == "__main__":
    sys.exit(cli.main())
