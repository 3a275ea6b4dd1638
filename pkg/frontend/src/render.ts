/** DOM rendering. The whole board re-renders from controller state on
 * every change; boards are small enough that diffing would be noise. */

import { buildColumns, exportPartitionFile } from "./board";
import type { BoardController } from "./controller";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderHeader(controller: BoardController): HTMLElement {
  const state = controller.state!;
  const header = el("header", "toolbar");

  header.append(el("h1", "title", "tracepart board"));
  header.append(
    el("span", "meta", `n=${state.target_n} · rev ${state.revision} · ${state.edit_count} edit(s)`),
  );

  const nInput = el("input", "n-input") as HTMLInputElement;
  nInput.type = "number";
  nInput.min = "1";
  nInput.value = String(state.target_n);
  const recut = el("button", "action", "Re-cut");
  recut.addEventListener("click", () => {
    const n = Number(nInput.value);
    if (Number.isInteger(n) && n >= 1) void controller.repartition(n);
  });

  const reset = el("button", "action", "Reset");
  reset.addEventListener("click", () => void controller.reset());

  const exportButton = el("button", "action", "Export");
  exportButton.addEventListener("click", () => {
    const blob = new Blob(
      [JSON.stringify(exportPartitionFile(state), null, 2) + "\n"],
      { type: "application/json" },
    );
    const link = el("a") as HTMLAnchorElement;
    link.href = URL.createObjectURL(blob);
    link.download = "partitions.json";
    link.click();
    URL.revokeObjectURL(link.href);
  });

  header.append(nInput, recut, reset, exportButton);
  return header;
}

function renderMetrics(controller: BoardController): HTMLElement {
  const panel = el("section", "metrics");
  for (const row of controller.metricPanel()) {
    const item = el("div", "metric");
    item.append(el("span", "metric-name", row.name));
    item.append(el("span", "metric-value", row.value));
    item.append(el("span", `metric-delta delta-${row.tone}`, row.delta));
    panel.append(item);
  }
  return panel;
}

function renderColumns(controller: BoardController): HTMLElement {
  const board = el("main", "board");
  for (const column of buildColumns(controller.state!)) {
    const section = el("section", "column");
    section.addEventListener("dragover", (event) => event.preventDefault());
    section.addEventListener("drop", (event) => {
      event.preventDefault();
      const className = event.dataTransfer?.getData("text/plain");
      if (className) void controller.moveClass(className, column.id);
    });

    section.append(el("h2", "column-title", column.title));

    const badges = el("div", "badges");
    for (const badge of column.badges) {
      badges.append(el("span", "badge", `${badge.label} ×${badge.count}`));
    }
    section.append(badges);

    const chips = el("div", "chips");
    for (const chip of column.chips) {
      const node = el("span", "chip", chip.name);
      node.draggable = true;
      node.addEventListener("dragstart", (event) => {
        event.dataTransfer?.setData("text/plain", chip.name);
      });
      if (chip.isInterface) {
        const marker = el("span", "iface", "⇄");
        marker.title = "called from other partitions";
        node.append(marker);
      }
      chips.append(node);
    }
    section.append(chips);
    board.append(section);
  }
  return board;
}

export function render(root: HTMLElement, controller: BoardController): void {
  root.replaceChildren();

  if (controller.status.kind === "loading") {
    root.append(el("div", "banner", "Loading board…"));
    return;
  }
  if (controller.status.kind === "error") {
    const banner = el("div", "banner banner-error");
    banner.append(el("span", undefined, `Cannot reach the service: ${controller.status.message} `));
    const retry = el("button", "action", "Retry");
    retry.addEventListener("click", () => void controller.load());
    banner.append(retry);
    root.append(banner);
    return;
  }

  if (controller.notice) {
    root.append(el("div", "banner banner-notice", controller.notice));
  }
  root.append(renderHeader(controller));
  root.append(renderMetrics(controller));
  root.append(renderColumns(controller));
}
