"""In-process stand-in for a Neo4j HTTP transactional endpoint."""
import base64
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer


class MockEndpoint:
    """Accepts commit requests, recording each; ``fail_at`` (1-based) makes that request fail.

    ``failure`` is ``"errors"`` for a 200 reply carrying a Cypher error, or
    ``"http"`` for a bare 500.
    """

    def __init__(self, fail_at=None, failure="errors", user="neo4j", password="secret"):
        self.fail_at = fail_at
        self.failure = failure
        self.expected_auth = "Basic " + base64.b64encode(f"{user}:{password}".encode()).decode()
        self.requests = []
        self._lock = threading.Lock()
        endpoint = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def do_POST(self):
                length = int(self.headers.get("Content-Length", 0))
                body = json.loads(self.rfile.read(length) or b"{}")
                with endpoint._lock:
                    endpoint.requests.append({"path": self.path, "auth": self.headers.get("Authorization"),
                                              "body": body})
                    k = len(endpoint.requests)
                if self.headers.get("Authorization") != endpoint.expected_auth:
                    return self._reply(401, {"errors": [{"code": "Neo.ClientError.Security.Unauthorized",
                                                         "message": "bad credentials"}]})
                if endpoint.fail_at == k:
                    if endpoint.failure == "http":
                        self.send_response(500)
                        self.end_headers()
                        return
                    return self._reply(200, {"results": [], "errors": [
                        {"code": "Neo.ClientError.Statement.SyntaxError", "message": f"bad statement in request {k}"}
                    ]})
                results = [{"columns": [], "data": []} for _ in body.get("statements", [])]
                return self._reply(200, {"results": results, "errors": []})

            def _reply(self, status, payload):
                data = json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.url = f"http://127.0.0.1:{self.server.server_address[1]}"
        self._thread = threading.Thread(target=self.server.serve_forever, daemon=True)

    def __enter__(self):
        self._thread.start()
        return self

    def __exit__(self, *exc):
        self.server.shutdown()
        self.server.server_close()
