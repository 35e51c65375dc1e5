import os
from pathlib import Path

import pytest

from absagen import load_semeval14, load_semeval1516, load_sentihood

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def se14():
    return load_semeval14(DATA / "se14_restaurants.xml")


@pytest.fixture(scope="session")
def se15():
    return load_semeval1516(DATA / "se15_restaurants.xml", 15)


@pytest.fixture(scope="session")
def se16():
    return load_semeval1516(DATA / "se16_restaurants.xml", 16)


@pytest.fixture(scope="session")
def sentihood():
    return load_sentihood(DATA / "sentihood_train.json")


@pytest.fixture(scope="session")
def all_splits(se14, se15, se16, sentihood):
    return {
        "restaurants-14": se14,
        "restaurants-15": se15,
        "restaurants-16": se16,
        "sentihood": sentihood,
    }


def official_files():
    """Real corpus files supplied through ABSA_DATA_DIR, when available."""
    root = os.environ.get("ABSA_DATA_DIR")
    if not root or not Path(root).is_dir():
        return []
    found = []
    for path in sorted(Path(root).glob("**/*")):
        if path.suffix.lower() == ".json":
            found.append(("sentihood", path))
        elif path.suffix.lower() == ".xml":
            head = path.read_text(encoding="utf-8", errors="replace")[:2000]
            if "<Reviews" in head:
                year = 15 if "15" in path.name else 16
                found.append((f"restaurants-{year}", path))
            elif "<sentences" in head:
                found.append(("restaurants-14", path))
    return found


def load_official(name, path):
    if name == "restaurants-14":
        return load_semeval14(path)
    if name == "restaurants-15":
        return load_semeval1516(path, 15)
    if name == "restaurants-16":
        return load_semeval1516(path, 16)
    return load_sentihood(path)
