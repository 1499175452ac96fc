/** Small DOM helpers shared by the three views. */

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) {
    node.removeChild(node.firstChild);
  }
}

/**
 * Text with case-insensitive <mark> highlights for each phrase's first
 * occurrence. Purely presentational: which phrases to mark is decided by
 * the server.
 */
export function highlightPhrases(text: string, phrases: string[]): DocumentFragment {
  const ranges: [number, number][] = [];
  const lower = text.toLowerCase();
  for (const phrase of phrases) {
    const needle = phrase.toLowerCase().trim();
    if (!needle) continue;
    const start = lower.indexOf(needle);
    if (start >= 0) ranges.push([start, start + needle.length]);
  }
  return fragmentWithMarks(text, ranges);
}

/** Text with <mark> elements over the given character ranges. */
export function fragmentWithMarks(text: string, spans: [number, number][]): DocumentFragment {
  const fragment = document.createDocumentFragment();
  const ordered = mergeSpans(spans, text.length);
  let cursor = 0;
  for (const [start, end] of ordered) {
    if (start > cursor) {
      fragment.appendChild(document.createTextNode(text.slice(cursor, start)));
    }
    const mark = document.createElement("mark");
    mark.textContent = text.slice(start, end);
    fragment.appendChild(mark);
    cursor = end;
  }
  if (cursor < text.length) {
    fragment.appendChild(document.createTextNode(text.slice(cursor)));
  }
  return fragment;
}

function mergeSpans(spans: [number, number][], length: number): [number, number][] {
  const valid = spans
    .map(([a, b]): [number, number] => [Math.max(0, a), Math.min(length, b)])
    .filter(([a, b]) => a < b)
    .sort((x, y) => x[0] - y[0]);
  const merged: [number, number][] = [];
  for (const span of valid) {
    const last = merged[merged.length - 1];
    if (last && span[0] <= last[1]) {
      last[1] = Math.max(last[1], span[1]);
    } else {
      merged.push([span[0], span[1]]);
    }
  }
  return merged;
}
