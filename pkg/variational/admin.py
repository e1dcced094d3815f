from django.contrib import admin
from django.db import models
from django.forms import Textarea
from django.http import HttpResponse
from django.utils import timezone
from django.utils.html import format_html
from django.utils.translation import gettext_lazy as _
import io

from .models import RunRecord
from .utils.exports import render_runs_workbook

admin.site.site_header = _("DVQOA Run History")
admin.site.site_title = _("DVQOA Admin")
admin.site.index_title = _("Stored variational runs")


@admin.register(RunRecord)
class RunRecordAdmin(admin.ModelAdmin):
    list_display = [
        "id",
        "command",
        "family",
        "n",
        "arity",
        "gate_set",
        "mode",
        "replicas",
        "seed",
        "best_cost",
        "ratio_colored",
        "wall_time_s",
        "created_at",
    ]
    list_filter = ["command", "family", "gate_set", "reference_source", "created_at"]
    search_fields = ["command", "family", "mode", "output_path"]
    readonly_fields = ["created_at"]
    list_per_page = 25
    actions = ["export_selected_runs"]

    fieldsets = (
        (_("Problem"), {"fields": ("command", "family", "n", "arity", "max_order")}),
        (
            _("Configuration"),
            {"fields": ("m", "t", "gate_set", "mode", "replicas", "workers", "seed")},
        ),
        (
            _("Outcome"),
            {
                "fields": (
                    "best_cost",
                    "found_value",
                    "reference",
                    "reference_source",
                    "approx_ratio",
                    "wall_time_s",
                )
            },
        ),
        (
            _("Files"),
            {"fields": ("output_path", "result"), "classes": ("collapse",)},
        ),
        (_("Timestamps"), {"fields": ("created_at",), "classes": ("collapse",)}),
    )

    formfield_overrides = {
        models.JSONField: {"widget": Textarea(attrs={"rows": 12, "cols": 100})},
    }

    def ratio_colored(self, obj):
        if obj.approx_ratio is None:
            return "-"
        color = "green" if abs(obj.approx_ratio - 1.0) < 1e-9 else "orange"
        return format_html(
            '<span style="color: {};">{}</span>',
            color,
            f"{obj.approx_ratio:.6f}",
        )

    ratio_colored.short_description = _("Approx. ratio")
    ratio_colored.admin_order_field = "approx_ratio"

    @admin.action(description=_("Export selected runs to Excel"))
    def export_selected_runs(self, request, queryset):
        wb = render_runs_workbook(queryset)
        output = io.BytesIO()
        wb.save(output)
        output.seek(0)

        filename = f"runs_{timezone.now():%Y%m%d_%H%M%S}.xlsx"
        response = HttpResponse(
            output.getvalue(),
            content_type=(
                "application/vnd.openxmlformats-officedocument.spreadsheetml.sheet"
            ),
        )
        response["Content-Disposition"] = f'attachment; filename="{filename}"'
        return response
