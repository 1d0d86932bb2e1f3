from sqlmodel import SQLModel, Field
import os


class EngineSettings(SQLModel):
    """
    Limits and defaults for the combinatorial engine.

    Every service receives an instance of this class; command-line flags and
    request fields derive a copy with ``model_copy(update=...)`` instead of
    mutating the module-level singleton.
    """

    # Verification
    violation_cap: int = Field(default=int(os.getenv("TPKIT_VIOLATION_CAP", 32)), ge=0)
    violation_scan_cap: int = Field(default=int(os.getenv("TPKIT_SCAN_CAP", 256)), ge=1)

    # Search budgets
    budget_assignments: int = Field(default=int(os.getenv("TPKIT_BUDGET_ASSIGNMENTS", 2_000_000)), ge=1)
    budget_seconds: float = Field(default=float(os.getenv("TPKIT_BUDGET_SECONDS", 60.0)), ge=0)
    threads: int = Field(default=int(os.getenv("TPKIT_THREADS", 1)), ge=1)

    # Canonical witness sizes
    canonical_node_budget: int = Field(default=int(os.getenv("TPKIT_CANONICAL_NODES", 4096)), ge=1)
    canonical_cell_budget: int = Field(default=int(os.getenv("TPKIT_CANONICAL_CELLS", 65536)), ge=1)

    @property
    def deadline_enabled(self) -> bool:
        """
        Check whether searches run against a wall-clock deadline.

        Returns
        -------
        bool
            True when ``budget_seconds`` is positive.
        """
        return self.budget_seconds > 0


class AppSettings(SQLModel):
    """
    Application-wide configuration settings.

    Manages various application-level configurations
    using SQLModel for type safety and validation.
    """

    # Application Metadata
    name: str = Field(default="tpkit")
    version: str = Field(default="0.1.0")
    description: str = Field(default="Executable combinatorics of tree properties: indices, patterns, transforms and amalgamation")

    # Environment Configuration
    environment: str = Field(default=os.getenv("APP_ENV", "development"))
    debug: bool = Field(default=os.getenv("DEBUG", "False").lower() == "true")

    # Logging
    log_level: str = Field(default=os.getenv("LOG_LEVEL", "WARNING"))

    # HTTP service
    host: str = Field(default=os.getenv("TPKIT_HOST", "0.0.0.0"))
    port: int = Field(default=int(os.getenv("TPKIT_PORT", 8000)))

    @property
    def is_production(self) -> bool:
        """
        Check if the application is running in production mode.

        Returns
        -------
        bool
            True if environment is production, False otherwise.
        """
        return self.environment.lower() == "production"


# Create singleton instances
settings = EngineSettings()
app_settings = AppSettings()
