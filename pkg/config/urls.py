"""
URL configuration for the dvqoa project.

Only the admin site is served; it browses the stored run history.
"""

from django.contrib import admin
from django.urls import path
from django.shortcuts import redirect


def home_redirect(request):
    """Redirect root URL to admin interface"""
    return redirect("/admin/")


urlpatterns = [
    path("", home_redirect, name="home"),
    path("admin/", admin.site.urls),
]
