from django.db import models


class ProblemFamily(models.TextChoices):
    QUBO = "qubo", "QUBO"
    MAXCUT = "maxcut", "Max-Cut"
    TSP = "tsp", "Traveling salesman"
    HIGHER_ORDER = "hobo", "Higher-order binary"
    NARY = "nary", "N-ary"
    CHEMISTRY = "chem", "Pauli-sum eigenvalue"
    PHOTONIC = "photonic", "Layered photonic FOM"
    BLACKBOX = "blackbox", "Black-box cost"


class ReferenceSource(models.TextChoices):
    ORACLE = "oracle", "Oracle"
    EXTERNAL = "external", "External"
    NONE = "none", "None"
