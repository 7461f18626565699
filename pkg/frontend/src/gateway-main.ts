// Gateway entry point: node dist/gateway-main.js [--server host:port] [--port N]

import path from "node:path";
import { fileURLToPath } from "node:url";
import { startGateway } from "./gateway.js";

const argv = process.argv.slice(2);

function flag(name: string, fallback: string): string {
  const i = argv.indexOf(`--${name}`);
  return i >= 0 && argv[i + 1] ? argv[i + 1] : fallback;
}

const serverAddr = flag("server", process.env.KITCHENSIM_ADDR ?? "127.0.0.1:7788");
const [host, port] = serverAddr.split(":");
const here = path.dirname(fileURLToPath(import.meta.url));

startGateway({
  serverHost: host,
  serverPort: Number(port),
  staticDir: path.resolve(here, "..", "static"),
  port: Number(flag("port", "8080")),
}).then(({ port: boundPort }) => {
  console.log(`kitchensim web UI on http://127.0.0.1:${boundPort} (environment server ${serverAddr})`);
});
