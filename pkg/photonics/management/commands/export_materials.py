from django.core.management.base import BaseCommand

from photonics.materials import MaterialDb
from problems.utils.commands import echo_config, translate_errors


class Command(BaseCommand):
    help = "Write the built-in material tables as wavelength_nm,n,k CSV files"

    def add_arguments(self, parser):
        parser.add_argument("--out", required=True, help="Target directory")

    def handle(self, *args, **options):
        echo_config(self, options)
        with translate_errors():
            paths = MaterialDb.builtin().export(options["out"])
        for path in paths:
            self.stdout.write(f"Wrote {path}")
        self.stdout.write(self.style.SUCCESS(f"Exported {len(paths)} materials"))
