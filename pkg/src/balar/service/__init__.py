from .app import create_app
from .views import build_session_view

__all__ = ["build_session_view", "create_app"]
