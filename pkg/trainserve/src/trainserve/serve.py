"""HTTP serving of a saved model: ``POST /generate`` and ``GET /health``.

The request/response JSON follows the shared protocol:
``{"prompt", "max_new_tokens", "stop", "temperature"}`` in,
``{"text": ...}`` out.  Temperature 0 means greedy decoding; generation for
a single request is single-stream, guarded by a lock.
"""

from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import torch

from trainserve.train import load_model

__all__ = ["GenerationServer", "serve"]


class GenerationServer:
    def __init__(self, model_dir: str, port: int = 0, host: str = "127.0.0.1"):
        self.model, self.tokenizer, self.meta = load_model(model_dir)
        self.model_id = f"{self.meta.get('base_model', '?')}@{Path(model_dir).name}"
        self._lock = threading.Lock()
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_GET(self):
                if self.path == "/health":
                    self._json(200, {"model": server.model_id, "status": "ok"})
                else:
                    self._json(404, {"error": "not found"})

            def do_POST(self):
                if self.path != "/generate":
                    self._json(404, {"error": "not found"})
                    return
                length = int(self.headers.get("Content-Length", 0))
                try:
                    payload = json.loads(self.rfile.read(length))
                    prompt = payload["prompt"]
                    if not isinstance(prompt, str):
                        raise ValueError("prompt must be a string")
                except (ValueError, KeyError) as exc:
                    self._json(400, {"error": f"bad request: {exc}"})
                    return
                try:
                    text = server.generate(
                        prompt,
                        max_new_tokens=int(payload.get("max_new_tokens", 128)),
                        stop=payload.get("stop") or [],
                        temperature=float(payload.get("temperature", 0.0)),
                    )
                except ValueError as exc:
                    self._json(400, {"error": str(exc)})
                    return
                self._json(200, {"text": text})

            def _json(self, status: int, obj: dict):
                body = json.dumps(obj, ensure_ascii=False).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        self._httpd = ThreadingHTTPServer((host, port), Handler)
        self._thread: threading.Thread | None = None

    def generate(
        self,
        prompt: str,
        max_new_tokens: int = 128,
        stop: list[str] | None = None,
        temperature: float = 0.0,
    ) -> str:
        ids = self.tokenizer.encode(prompt)
        context = self.model.config.n_positions
        if not ids:
            raise ValueError("empty prompt")
        if len(ids) >= context:
            raise ValueError(f"prompt has {len(ids)} tokens; limit {context - 1}")
        budget = max(1, min(max_new_tokens, context - len(ids)))
        input_ids = torch.tensor([ids], dtype=torch.long)
        kwargs = dict(
            max_new_tokens=budget,
            min_new_tokens=1,
            eos_token_id=self.tokenizer.eos_id,
            pad_token_id=self.tokenizer.pad_id,
            attention_mask=torch.ones_like(input_ids),
        )
        if temperature and temperature > 0:
            kwargs.update(do_sample=True, temperature=temperature)
        else:
            kwargs.update(do_sample=False)
        with self._lock, torch.no_grad():
            output = self.model.generate(input_ids, **kwargs)
        text = self.tokenizer.decode_continuation(output[0][len(ids):].tolist())
        for marker in stop or []:
            if marker:
                text = text.split(marker)[0]
        return text.strip()

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address
        return f"http://{host}:{port}"

    def start(self) -> "GenerationServer":
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, daemon=True
        )
        self._thread.start()
        return self

    def shutdown(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self) -> "GenerationServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.shutdown()


def serve(model_dir: str, port: int, host: str = "127.0.0.1") -> None:
    """Blocking entry point; raises OSError when the port is taken."""
    server = GenerationServer(model_dir, port=port, host=host)
    print(f"serving {server.model_id} on {server.url}")
    try:
        server._httpd.serve_forever()
    except KeyboardInterrupt:
        server.shutdown()
