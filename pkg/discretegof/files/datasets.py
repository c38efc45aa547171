"""Datasets shipped with the package."""

import hashlib
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Dict, List

DATA_PACKAGE = "discretegof.data"


@dataclass(frozen=True)
class Dataset:
    name: str
    description: str
    sha256: str


DATASETS: Dict[str, Dataset] = {
    dataset.name: dataset
    for dataset in (
        Dataset("rhesus.csv", "Haplotype-pair counts of 8297 rhesus macaques (45 pair bins)",
                "79579347c8814d76278379a105cda02d8ef3d8181a6dcc32d87cd52939c66075"),
        Dataset("candy.csv", "Colors of 62 chocolate-coated candies",
                "08ffc7600dad1b406402b3edd3fe41b9ed623d88d7674fbd38478e8d5495a286"),
        Dataset("candy_model.csv", "Uniform color model for candy.csv",
                "f62faa105995052b9ebdd770ed18cab1cd285b9271150c669c6234965bba4b30"),
        Dataset("poisson_observed.csv", "One draw at each of 100..109, for a Poisson(100) test",
                "4464ff22276c4b0d98f52bca65b398320b19f119068a8dc59bf1f3bacb5335c8"),
    )
}


def dataset_path(name: str) -> Path:
    if name not in DATASETS:
        raise KeyError(name)
    return Path(str(resources.files(DATA_PACKAGE).joinpath(name)))


def resolve_path(path) -> Path:
    """The path itself if it exists, else the bundled dataset of that name."""
    candidate = Path(path)
    if not candidate.exists() and candidate.name == str(path) and str(path) in DATASETS:
        return dataset_path(str(path))
    return candidate


def checksum(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def list_datasets() -> List[Dict]:
    """Name, row count, total count and checksum status of each dataset."""
    listing = []
    for dataset in DATASETS.values():
        path = dataset_path(dataset.name)
        lines = path.read_text(encoding="utf-8").splitlines()[1:]
        values = [line.split(",")[1] for line in lines if line.strip()]
        record = {
            "name": dataset.name,
            "description": dataset.description,
            "rows": len(values),
            "sha256": dataset.sha256,
            "verified": checksum(path) == dataset.sha256,
        }
        if lines and dataset.name != "candy_model.csv":
            record["n"] = sum(int(v) for v in values)
        listing.append(record)
    return listing
