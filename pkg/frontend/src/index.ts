export * from "./types.js";
export * from "./api.js";
export * from "./viewState.js";
export * from "./threshold.js";
export * from "./render.js";
export * from "./video.js";
export * from "./tooltip.js";
export * from "./sidebar.js";
