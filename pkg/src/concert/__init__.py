"""Classroom teamwork analytics: multi-source activity ingestion, team
balance metrics, a boolean filter DSL, and intervention email drafts."""

__version__ = "0.1.0"
