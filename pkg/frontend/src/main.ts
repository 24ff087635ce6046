// Browser entry point: wires the connection, rolling buffer, charts and the
// labeling controls together.

import { RollingBuffer } from "./buffer.js";
import { ScrollingChart } from "./chart.js";
import { ConsoleConnection } from "./connection.js";
import { GESTURES } from "./protocol.js";
import { SessionController } from "./session.js";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node as T;
}

function main(): void {
  const params = new URLSearchParams(window.location.search);
  const endpoint = params.get("ws") ?? `ws://${window.location.hostname}:8765`;

  const buffer = new RollingBuffer(60_000);
  const magChart = new ScrollingChart(el("mag-chart"), (s) => s.mag, 60_000, "#2a7ae2");
  const phaseChart = new ScrollingChart(el("phase-chart"), (s) => s.phase, 60_000, "#d2691e");
  const statusBanner = el<HTMLDivElement>("status");
  const errorToast = el<HTMLDivElement>("error-toast");
  const intervalList = el<HTMLUListElement>("intervals");
  const toggleMode = el<HTMLInputElement>("toggle-mode");

  const connection = new ConsoleConnection(endpoint, {
    onStatus: (status) => {
      statusBanner.textContent = status;
      statusBanner.className = `status status-${status}`;
      setControlsEnabled(status === "open");
    },
    onMessage: (msg) => {
      if (msg.type === "sample") {
        if (buffer.push(msg)) {
          magChart.render(buffer);
          phaseChart.render(buffer);
        }
      } else if (msg.type === "ack") {
        session.handleAck(msg);
      } else {
        session.handleError(msg);
      }
    },
  });

  const session = new SessionController((msg) => {
    if (!connection.send(msg)) {
      session.lastError = "not connected";
      session.onChange();
    }
  });

  session.onChange = () => {
    el("session-phase").textContent = session.phase;
    errorToast.textContent = session.lastError ?? "";
    errorToast.style.display = session.lastError ? "block" : "none";
    intervalList.innerHTML = "";
    for (const interval of session.intervals) {
      const item = document.createElement("li");
      const name = GESTURES[interval.classCode]?.name ?? `class ${interval.classCode}`;
      item.textContent =
        `${name}: ${(interval.startMs / 1000).toFixed(2)}s – ` +
        `${(interval.endMs / 1000).toFixed(2)}s`;
      intervalList.appendChild(item);
    }
    if (session.result) {
      el("session-result").textContent =
        `saved ${session.result.path} (${session.result.frames} frames, ` +
        `${session.result.labels} labels)`;
    }
  };

  function setControlsEnabled(enabled: boolean): void {
    document.querySelectorAll<HTMLButtonElement>("button[data-needs-connection]")
      .forEach((b) => { b.disabled = !enabled; });
  }

  el<HTMLButtonElement>("start-btn").addEventListener("click", () => {
    const subject = Number(el<HTMLInputElement>("subject-id").value || "0");
    session.start(subject);
  });
  el<HTMLButtonElement>("stop-btn").addEventListener("click", () => session.stop());

  const buttons = el<HTMLDivElement>("gesture-buttons");
  for (const gesture of GESTURES.slice(1)) {
    const button = document.createElement("button");
    button.textContent = gesture.name;
    button.dataset.needsConnection = "true";
    button.addEventListener("pointerdown", () => {
      if (toggleMode.checked) {
        session.toggleLabel(gesture.code);
      } else {
        session.labelDown(gesture.code);
      }
    });
    button.addEventListener("pointerup", () => {
      if (!toggleMode.checked) session.labelUp();
    });
    button.addEventListener("pointerleave", () => {
      if (!toggleMode.checked) session.labelUp();
    });
    buttons.appendChild(button);
  }

  setControlsEnabled(false);
  connection.connect();
}

window.addEventListener("load", main);
