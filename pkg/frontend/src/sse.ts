/**
 * Minimal server-sent-events reader over fetch streaming.  Works in the
 * browser and in node (EventSource is not available in node), and exposes
 * the event name so terminal markers can be told apart from data.
 */

export interface SseMessage {
  event: string | null;
  data: string;
}

export async function* readSse(
  url: string,
  signal?: AbortSignal,
): AsyncGenerator<SseMessage> {
  const response = await fetch(url, { signal });
  if (!response.ok || !response.body) {
    throw new Error(`stream request failed: ${response.status}`);
  }
  const reader = response.body.getReader();
  const decoder = new TextDecoder();
  let buffer = "";
  try {
    while (true) {
      const { done, value } = await reader.read();
      if (done) break;
      buffer += decoder.decode(value, { stream: true });
      let sep;
      while ((sep = buffer.indexOf("\n\n")) >= 0) {
        const block = buffer.slice(0, sep);
        buffer = buffer.slice(sep + 2);
        let event: string | null = null;
        const dataLines: string[] = [];
        for (const line of block.split("\n")) {
          if (line.startsWith("event:")) event = line.slice(6).trim();
          else if (line.startsWith("data:")) dataLines.push(line.slice(5).trim());
        }
        if (dataLines.length > 0) {
          yield { event, data: dataLines.join("\n") };
        }
      }
    }
  } finally {
    reader.releaseLock();
  }
}
