class ErroreConfigurazione(ValueError):
    """Scenario non valido (parametri, passo, nome, analisi richieste)."""


class ErroreIO(OSError):
    """Lettura o scrittura di un file fallita; il messaggio riporta sempre il percorso."""
