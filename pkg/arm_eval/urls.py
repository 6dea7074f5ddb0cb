"""
URL configuration for the arm_eval project.

Only the admin is served: it is the browser for recorded runs and their
per-claim outcomes.
"""
from django.contrib import admin
from django.urls import path

urlpatterns = [
    path('admin/', admin.site.urls),
]
