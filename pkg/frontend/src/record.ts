// Session recording: raw server lines, one JSON frame per line, so a
// recording replays through the same parser that handled it live.

export class SessionRecorder {
  private lines: string[] = [];
  recording = false;

  add(rawLine: string): void {
    if (this.recording) this.lines.push(rawLine);
  }

  get count(): number {
    return this.lines.length;
  }

  toText(): string {
    return this.lines.length ? this.lines.join("\n") + "\n" : "";
  }

  clear(): void {
    this.lines = [];
  }
}

export function downloadText(filename: string, text: string): void {
  const blob = new Blob([text], { type: "application/x-ndjson" });
  const url = URL.createObjectURL(blob);
  const a = document.createElement("a");
  a.href = url;
  a.download = filename;
  a.click();
  URL.revokeObjectURL(url);
}
