# Errori di dominio delle operazioni numeriche.
# La validazione dei tipi valore (parametri, stati, passi) usa invece ValidationError di Django.


class ErroreDominio(ValueError):
    """Operazione chiamata fuori dal suo dominio (es. coordinate non positive)."""


class PuntoNonFisso(ErroreDominio):
    """Classificazione richiesta su un punto che non e' un punto fisso del sistema."""
