"""OpenTelemetry tracing setup for Jaeger"""

import contextlib
import os
from collections.abc import Iterator
from typing import Any

try:
    from opentelemetry import trace
    from opentelemetry.exporter.jaeger.thrift import JaegerExporter
    from opentelemetry.sdk.trace import TracerProvider
    from opentelemetry.sdk.trace.export import BatchSpanProcessor
    from opentelemetry.sdk.resources import Resource
    OPENTELEMETRY_AVAILABLE = True
except ImportError:
    OPENTELEMETRY_AVAILABLE = False
    trace = None
    TracerProvider = None

from ..config import settings

_configured = False


def setup_tracing(service_name: str | None = None) -> bool:
    """
    Set up OpenTelemetry tracing with Jaeger

    Runs at most once per process and only when tracing is enabled in the
    settings; otherwise spans stay on the no-op provider.

    Args:
        service_name: Name of the service for tracing

    Returns:
        True if a Jaeger exporter is installed after the call
    """
    global _configured
    if _configured or not settings.tracing_enabled:
        return _configured
    if not OPENTELEMETRY_AVAILABLE:
        print("Warning: opentelemetry not installed. Tracing disabled.")
        return False

    resource = Resource.create({
        "service.name": service_name or settings.tracing_service_name,
        "service.version": "0.1.0",
    })

    trace.set_tracer_provider(TracerProvider(resource=resource))

    jaeger_exporter = JaegerExporter(
        agent_host_name=os.getenv("JAEGER_AGENT_HOST", "localhost"),
        agent_port=int(os.getenv("JAEGER_AGENT_PORT", "6831")),
        endpoint=os.getenv("JAEGER_ENDPOINT", "http://localhost:14268/api/traces"),
    )

    trace.get_tracer_provider().add_span_processor(BatchSpanProcessor(jaeger_exporter))
    _configured = True
    return True


def get_tracer(name: str | None = None):
    """
    Get a tracer instance

    Returns:
        Tracer instance or None if OpenTelemetry not available
    """
    if not OPENTELEMETRY_AVAILABLE:
        return None

    return trace.get_tracer(name or settings.tracing_service_name)


@contextlib.contextmanager
def traced(span_name: str, **attributes: Any) -> Iterator[Any]:
    """
    Run a block inside a span; a no-op when tracing is unavailable

    Args:
        span_name: Span name, e.g. "train.stage1"
        **attributes: Span attributes (scalars only)
    """
    tracer = get_tracer()
    if tracer is None:
        yield None
        return
    with tracer.start_as_current_span(span_name) as span:
        for key, value in attributes.items():
            span.set_attribute(key, value)
        yield span
