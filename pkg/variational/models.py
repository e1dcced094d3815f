from django.core.exceptions import ValidationError
from django.db import models
from django.utils.translation import gettext_lazy as _

from problems.enums import ProblemFamily, ReferenceSource

from .enums import GateSet


class RunRecord(models.Model):
    """A solved run kept in the run history."""

    command = models.CharField(_("Command"), max_length=32)
    family = models.CharField(
        _("Family"), max_length=16, choices=ProblemFamily.choices
    )
    n = models.PositiveIntegerField(_("Variables"))
    arity = models.PositiveSmallIntegerField(_("Arity (N)"), default=2)
    max_order = models.PositiveSmallIntegerField(
        _("Order (k)"), blank=True, null=True
    )
    m = models.PositiveSmallIntegerField(_("Layers (m)"))
    t = models.PositiveSmallIntegerField(_("Repeats (t)"))
    gate_set = models.CharField(
        _("Gate set"), max_length=8, choices=GateSet.choices, default=GateSet.RY
    )
    mode = models.CharField(_("Mode"), max_length=32)
    replicas = models.PositiveIntegerField(_("Replicas"))
    workers = models.PositiveIntegerField(_("Workers"), default=1)
    seed = models.BigIntegerField(_("Seed"))
    best_cost = models.FloatField(_("Best cost"))
    found_value = models.FloatField(_("Found value"))
    reference = models.FloatField(_("Reference"), blank=True, null=True)
    reference_source = models.CharField(
        _("Reference source"),
        max_length=16,
        choices=ReferenceSource.choices,
        default=ReferenceSource.NONE,
    )
    approx_ratio = models.FloatField(_("Approximation ratio"), blank=True, null=True)
    wall_time_s = models.FloatField(_("Wall time (s)"))
    output_path = models.CharField(_("Output path"), max_length=500, blank=True)
    result = models.JSONField(_("Result"), default=dict)
    created_at = models.DateTimeField(_("Created at"), auto_now_add=True)

    class Meta:
        db_table = "run_records"
        ordering = ["-created_at", "-id"]
        verbose_name = _("Run record")
        verbose_name_plural = _("Run records")

    def __str__(self):
        return f"{self.command} {self.family} n={self.n} seed={self.seed}"

    def clean(self):
        if self.approx_ratio is not None and self.reference is None:
            raise ValidationError(
                {"approx_ratio": _("An approximation ratio needs a reference.")}
            )
        if self.reference_source == ReferenceSource.NONE and self.reference is not None:
            raise ValidationError(
                {"reference_source": _("Say where the reference value came from.")}
            )

    @property
    def trace_files(self):
        return self.result.get("trace_files", [])

    @classmethod
    def from_result(cls, result, command, workers=1, output_path=""):
        data = result.to_dict()
        config = data["config"]
        record = cls(
            command=command,
            family=str(result.config.cost.family),
            n=config["n"],
            arity=config["N"],
            max_order=config["k"],
            m=config["m"],
            t=config["t"],
            gate_set=config["gate_set"],
            mode=config["mode"],
            replicas=config["replicas"],
            workers=workers,
            seed=config["seed"],
            best_cost=data["best_cost"],
            found_value=data["found_value"],
            reference=data["reference"],
            reference_source=data["reference_source"],
            approx_ratio=data["approx_ratio"],
            wall_time_s=data["wall_time_s"],
            output_path=str(output_path),
            result=data,
        )
        record.full_clean()
        record.save()
        return record
