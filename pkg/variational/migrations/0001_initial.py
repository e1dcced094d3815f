# Generated by Django 5.2.7 on 2026-10-19 09:12

from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name="RunRecord",
            fields=[
                (
                    "id",
                    models.BigAutoField(
                        auto_created=True,
                        primary_key=True,
                        serialize=False,
                        verbose_name="ID",
                    ),
                ),
                ("command", models.CharField(max_length=32, verbose_name="Command")),
                (
                    "family",
                    models.CharField(
                        choices=[
                            ("qubo", "QUBO"),
                            ("maxcut", "Max-Cut"),
                            ("tsp", "Traveling salesman"),
                            ("hobo", "Higher-order binary"),
                            ("nary", "N-ary"),
                            ("chem", "Pauli-sum eigenvalue"),
                            ("photonic", "Layered photonic FOM"),
                            ("blackbox", "Black-box cost"),
                        ],
                        max_length=16,
                        verbose_name="Family",
                    ),
                ),
                ("n", models.PositiveIntegerField(verbose_name="Variables")),
                (
                    "arity",
                    models.PositiveSmallIntegerField(
                        default=2, verbose_name="Arity (N)"
                    ),
                ),
                (
                    "max_order",
                    models.PositiveSmallIntegerField(
                        blank=True, null=True, verbose_name="Order (k)"
                    ),
                ),
                ("m", models.PositiveSmallIntegerField(verbose_name="Layers (m)")),
                ("t", models.PositiveSmallIntegerField(verbose_name="Repeats (t)")),
                (
                    "gate_set",
                    models.CharField(
                        choices=[
                            ("RY", "Ry only"),
                            ("RX", "Rx only"),
                            ("RXRY", "Alternating Rx·Ry"),
                        ],
                        default="RY",
                        max_length=8,
                        verbose_name="Gate set",
                    ),
                ),
                ("mode", models.CharField(max_length=32, verbose_name="Mode")),
                ("replicas", models.PositiveIntegerField(verbose_name="Replicas")),
                (
                    "workers",
                    models.PositiveIntegerField(default=1, verbose_name="Workers"),
                ),
                ("seed", models.BigIntegerField(verbose_name="Seed")),
                ("best_cost", models.FloatField(verbose_name="Best cost")),
                ("found_value", models.FloatField(verbose_name="Found value")),
                (
                    "reference",
                    models.FloatField(blank=True, null=True, verbose_name="Reference"),
                ),
                (
                    "reference_source",
                    models.CharField(
                        choices=[
                            ("oracle", "Oracle"),
                            ("external", "External"),
                            ("none", "None"),
                        ],
                        default="none",
                        max_length=16,
                        verbose_name="Reference source",
                    ),
                ),
                (
                    "approx_ratio",
                    models.FloatField(
                        blank=True, null=True, verbose_name="Approximation ratio"
                    ),
                ),
                ("wall_time_s", models.FloatField(verbose_name="Wall time (s)")),
                (
                    "output_path",
                    models.CharField(
                        blank=True, max_length=500, verbose_name="Output path"
                    ),
                ),
                ("result", models.JSONField(default=dict, verbose_name="Result")),
                (
                    "created_at",
                    models.DateTimeField(auto_now_add=True, verbose_name="Created at"),
                ),
            ],
            options={
                "verbose_name": "Run record",
                "verbose_name_plural": "Run records",
                "db_table": "run_records",
                "ordering": ["-created_at", "-id"],
            },
        ),
    ]
