from django.db import models


class GateSet(models.TextChoices):
    RY = "RY", "Ry only"
    RX = "RX", "Rx only"
    RXRY = "RXRY", "Alternating Rx·Ry"


class EvalKind(models.TextChoices):
    EXPECTATION = "expectation", "Analytic expectation"
    DECODE = "decode", "Deterministic decode"
    SHOTS = "shots", "Shot sampling"


class StopReason(models.TextChoices):
    CONVERGED = "converged", "Converged"
    PLATEAU = "plateau", "Plateau"
    MAX_ITERS = "max_iters", "Iteration limit"


class OptimizerMethod(models.TextChoices):
    NELDER_MEAD = "nelder-mead", "Nelder-Mead"
    COBYLA = "cobyla", "COBYLA"
