// Optional diagram rasterization. The Mermaid and Graphviz bundles are
// copied into dist/vendor/ by the build when available; without them the
// panes show the plain document text, which is always kept a click away.

type MermaidApi = { initialize(cfg: object): void; render(id: string, src: string): Promise<{ svg: string }> };
type GraphvizApi = { dot(src: string): string };

let mermaid: MermaidApi | null | undefined;
let graphviz: GraphvizApi | null | undefined;
let counter = 0;

async function loadMermaid(): Promise<MermaidApi | null> {
  if (mermaid !== undefined) return mermaid;
  const fromWindow = (globalThis as Record<string, unknown>)['mermaid'];
  if (fromWindow) {
    mermaid = fromWindow as MermaidApi;
    mermaid.initialize({ startOnLoad: false, theme: 'neutral' });
  } else {
    mermaid = null;
  }
  return mermaid;
}

async function loadGraphviz(): Promise<GraphvizApi | null> {
  if (graphviz !== undefined) return graphviz;
  try {
    // resolved against dist/ at runtime; only present when vendored
    const specifier = './vendor/graphviz.js';
    const mod = (await import(/* @vite-ignore */ specifier)) as {
      Graphviz: { load(): Promise<GraphvizApi> };
    };
    graphviz = await mod.Graphviz.load();
  } catch {
    graphviz = null;
  }
  return graphviz;
}

export async function renderMermaidInto(element: HTMLElement, source: string): Promise<void> {
  const api = await loadMermaid();
  if (!api) {
    fallback(element, source);
    return;
  }
  try {
    const { svg } = await api.render(`msc_${counter++}`, source);
    element.innerHTML = svg;
  } catch {
    fallback(element, source);
  }
}

export async function renderDotInto(element: HTMLElement, source: string): Promise<void> {
  const api = await loadGraphviz();
  if (!api) {
    fallback(element, source);
    return;
  }
  try {
    element.innerHTML = api.dot(source);
  } catch {
    fallback(element, source);
  }
}

function fallback(element: HTMLElement, source: string): void {
  const pre = document.createElement('pre');
  pre.className = 'diagram-source';
  pre.textContent = source;
  element.replaceChildren(pre);
}
