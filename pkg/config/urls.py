from django.urls import path, include

urlpatterns = [
    path('api/', include('laboratorio.urls')), #Includi le rotte API definite in laboratorio/urls.py
]
