import { ApiClient } from "./api";
import { BoardController } from "./controller";
import { render } from "./render";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const controller = new BoardController(new ApiClient(""));
controller.onChange(() => render(root, controller));
void controller.load();
