from django.urls import path, include
from rest_framework.routers import DefaultRouter #DefaultRouter genera automaticamente anche la root view (/)
from .views import PresetViewSet

router = DefaultRouter()

# I basename generano i nomi delle route: 'presets-list', 'presets-detail', 'presets-stabilita'
router.register(r'presets', PresetViewSet, basename='presets')

urlpatterns = [
    path('', include(router.urls)),
]
