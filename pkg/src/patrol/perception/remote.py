"""
HTTP adapter for remotely hosted caption and classification models.

Wire schema:
    POST {base_url}/classify  {"prompt": str, "image_b64": str?}
        -> {"text": str, "processing_ms": number?}
    POST {base_url}/caption   {"image_b64": str} -> {"text": str}
"""

from __future__ import annotations

import os
import threading
from logging import Logger
from typing import Any, Dict, NamedTuple, Tuple, cast
from urllib.parse import urljoin

import requests
from dotenv import load_dotenv

from ..core.clock import Clock, WallClock, to_s, to_us
from .models import Backend, Caption, PromptContext, RemoteEndpointConfig

PROCESSING_HEADER = "processing_ms"


class RemoteError(Exception):
    """Base of remote call failures, carrying the wall time spent before failing."""

    def __init__(self, message: str, elapsed_us: int = 0):
        super().__init__(message)
        self.elapsed_us = elapsed_us


class RemoteTimeout(RemoteError):
    """Raised when every attempt of a remote call timed out."""


class RemoteProtocolError(RemoteError):
    """Raised on transport failures or malformed payloads."""


class RemoteReply(NamedTuple):
    """Raw model text and the two components of the remote latency."""

    raw: str
    t_network_s: float
    t_processing_s: float


def _load_api_key(env_var: str) -> str:
    """
    Read the endpoint API key from the environment (after loading `.env`).

    Raises:
        ValueError: If the variable is not set.
    """
    load_dotenv()
    key = os.getenv(env_var)
    if not key:
        raise ValueError(f"Missing {env_var} in environment variables")
    return key


def _processing_ms(payload: Dict[str, Any], response: requests.Response) -> float:
    value = payload.get("processing_ms", response.headers.get(PROCESSING_HEADER))
    if value is None:
        return 0.0
    try:
        return max(0.0, float(value))
    except (TypeError, ValueError) as e:
        raise RemoteProtocolError(f"invalid processing_ms: {value!r}") from e


class RemoteClient:
    """
    Client for one remote endpoint.

    At most one request is in flight per client; the client may be handed
    between threads.
    """

    def __init__(
        self,
        cfg: RemoteEndpointConfig,
        clock: Clock | None = None,
        session: requests.Session | None = None,
        logger: Logger | None = None,
    ):
        self.cfg = cfg
        self.clock = clock or WallClock()
        self.session = session or requests.Session()
        self.logger = logger
        self._in_flight = threading.Lock()

    def failure_us(self, error: RemoteError) -> int:
        """
        Microseconds to charge for a failed call: the full timeout budget when
        every attempt timed out, the measured time otherwise.
        """
        if isinstance(error, RemoteTimeout):
            return to_us(self.cfg.timeout_s * (self.cfg.retries + 1))
        return error.elapsed_us

    def _send(self, url: str, body: Dict[str, Any], headers: Dict[str, str]) -> requests.Response:
        for take in range(self.cfg.retries + 1):
            try:
                return self.session.post(
                    url, json=body, headers=headers, timeout=self.cfg.timeout_s
                )
            except requests.Timeout:
                if self.logger:
                    self.logger.warning(
                        "Request to %s timed out, take %d of %d",
                        url,
                        take + 1,
                        self.cfg.retries + 1,
                    )
            except requests.RequestException as e:
                raise RemoteProtocolError(f"Request to {url} failed") from e
        raise RemoteTimeout(f"{url} timed out after {self.cfg.retries + 1} attempts")

    def _post(self, route: str, body: Dict[str, Any]) -> RemoteReply:
        url = urljoin(self.cfg.base_url.rstrip("/") + "/", route)
        headers = {"Authorization": f"Bearer {_load_api_key(self.cfg.api_key_env_var)}"}

        with self._in_flight:
            started = self.clock.now_us()
            try:
                response = self._send(url, body, headers)
            except RemoteError as e:
                e.elapsed_us = self.clock.now_us() - started
                raise
            elapsed_us = self.clock.now_us() - started

        try:
            response.raise_for_status()
            payload = response.json()
        except (requests.HTTPError, ValueError) as e:
            raise RemoteProtocolError(f"Malformed response from {url}", elapsed_us) from e
        if not isinstance(payload, dict) or not isinstance(payload.get("text"), str):
            raise RemoteProtocolError(f"Response from {url} lacks a 'text' string", elapsed_us)

        try:
            processing_us = to_us(_processing_ms(payload, response) / 1000)
        except RemoteProtocolError as e:
            e.elapsed_us = elapsed_us
            raise
        network_us = max(0, elapsed_us - processing_us)
        if self.logger:
            self.logger.debug(
                "%s answered in %d us (processing %d us)", url, elapsed_us, processing_us
            )
        return RemoteReply(
            raw=cast(str, payload["text"]),
            t_network_s=to_s(network_us),
            t_processing_s=to_s(processing_us),
        )

    def classify(self, ctx: PromptContext, image_b64: str | None = None) -> RemoteReply:
        """
        Send a rendered prompt to the remote classifier.

        Raises:
            RemoteTimeout: If every attempt timed out.
            RemoteProtocolError: On transport failure or malformed payload.
        """
        body: Dict[str, Any] = {"prompt": ctx.rendered}
        if image_b64 is not None:
            body["image_b64"] = image_b64
        return self._post("classify", body)

    def caption_reply(
        self, image_b64: str, source_frame: int = 0
    ) -> Tuple[Caption, RemoteReply]:
        """
        Caption an image remotely and keep the latency split of the call.

        Raises:
            RemoteTimeout: If every attempt timed out.
            RemoteProtocolError: On transport failure, malformed payload or an
                empty caption.
        """
        reply = self._post("caption", {"image_b64": image_b64})
        if not reply.raw:
            raise RemoteProtocolError(
                "Remote caption is empty",
                to_us(reply.t_network_s) + to_us(reply.t_processing_s),
            )
        caption = Caption(text=reply.raw, source_frame=source_frame, backend=Backend.REMOTE)
        return caption, reply

    def caption(self, image_b64: str, source_frame: int = 0) -> Caption:
        """Caption an image remotely."""
        return self.caption_reply(image_b64, source_frame)[0]


def remote_classify(
    ctx: PromptContext,
    cfg: RemoteEndpointConfig,
    clock: Clock | None = None,
    logger: Logger | None = None,
) -> RemoteReply:
    """
    One-shot remote classification.

    Args:
        ctx (PromptContext): Rendered prompt.
        cfg (RemoteEndpointConfig): Endpoint configuration.
        clock (Clock, optional): Time source, wall clock by default.
        logger (Logger, optional): Logger for logging messages.

    Returns:
        RemoteReply: Raw text, network time and server-reported processing time.
    """
    return RemoteClient(cfg, clock=clock, logger=logger).classify(ctx)


def remote_caption(
    image_b64: str,
    cfg: RemoteEndpointConfig,
    source_frame: int = 0,
    logger: Logger | None = None,
) -> Caption:
    """One-shot remote caption of an opaque base64 image."""
    return RemoteClient(cfg, logger=logger).caption(image_b64, source_frame)
