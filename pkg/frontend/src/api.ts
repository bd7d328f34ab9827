/** Thin typed client for the annotation server's REST interface. */
import {
    AnnotationRow,
    FrameDocument,
    HistoryAck,
    InterpolateAck,
    Manifest,
    ProjectionsDocument,
    SequenceInfo,
} from './types.js';

/** Error responses carry {"detail": {"reason", "message"}}. */
export class ApiError extends Error {
    constructor(
        readonly status: number,
        readonly reason: string,
        message: string,
    ) {
        super(message);
        this.name = 'ApiError';
    }
}

// Injectable so tests can run against an in-memory backend.
export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

const defaultFetch: FetchLike = (url, init) => fetch(url, init);

export class ApiClient {
    constructor(
        private readonly base: string = '',
        private readonly fetchFn: FetchLike = defaultFetch,
    ) {}

    private async raw(path: string, init?: RequestInit): Promise<Response> {
        const resp = await this.fetchFn(this.base + path, init);
        if (!resp.ok) {
            let reason = 'http-error';
            let message = `${resp.status} ${resp.statusText}`;
            try {
                const body = await resp.json();
                reason = body?.detail?.reason ?? reason;
                message = body?.detail?.message ?? message;
            } catch {
                // non-JSON error body; keep the status line
            }
            throw new ApiError(resp.status, reason, message);
        }
        return resp;
    }

    private async json<T>(path: string, init?: RequestInit): Promise<T> {
        const resp = await this.raw(path, init);
        return (await resp.json()) as T;
    }

    listSequences(): Promise<SequenceInfo[]> {
        return this.json('/api/sequences');
    }

    manifest(seq: string): Promise<Manifest> {
        return this.json(`/api/sequences/${encodeURIComponent(seq)}/manifest`);
    }

    annotations(seq: string, frame: number): Promise<FrameDocument> {
        return this.json(
            `/api/sequences/${encodeURIComponent(seq)}/frames/${frame}/annotations`,
        );
    }

    /** Replace a frame's rows; the server diffs against the previous state. */
    putAnnotations(seq: string, frame: number, rows: AnnotationRow[]): Promise<FrameDocument> {
        const doc = { format_version: 1, sequence_id: seq, annotations: rows };
        return this.json(
            `/api/sequences/${encodeURIComponent(seq)}/frames/${frame}/annotations`,
            {
                method: 'PUT',
                headers: { 'content-type': 'application/json' },
                body: JSON.stringify(doc),
            },
        );
    }

    interpolate(seq: string, track: number, start: number, end: number): Promise<InterpolateAck> {
        return this.json(
            `/api/sequences/${encodeURIComponent(seq)}/tracks/${track}/interpolate`,
            {
                method: 'POST',
                headers: { 'content-type': 'application/json' },
                body: JSON.stringify({ start, end }),
            },
        );
    }

    projections(seq: string, frame: number, track: number): Promise<ProjectionsDocument> {
        return this.json(
            `/api/sequences/${encodeURIComponent(seq)}/frames/${frame}/tracks/${track}/projections`,
        );
    }

    undo(seq: string): Promise<HistoryAck> {
        return this.json(`/api/sequences/${encodeURIComponent(seq)}/undo`, { method: 'POST' });
    }

    redo(seq: string): Promise<HistoryAck> {
        return this.json(`/api/sequences/${encodeURIComponent(seq)}/redo`, { method: 'POST' });
    }

    /** Canonical annotation file bytes, for export and reload comparisons. */
    async exportText(seq: string): Promise<string> {
        const resp = await this.raw(`/api/sequences/${encodeURIComponent(seq)}/export`);
        return await resp.text();
    }

    async pointcloud(seq: string, frame: number): Promise<Float32Array> {
        const resp = await this.raw(
            `/api/sequences/${encodeURIComponent(seq)}/frames/${frame}/pointcloud`,
        );
        return parsePointCloud(await resp.arrayBuffer());
    }

    imageUrl(seq: string, frame: number, camera: string): string {
        return (
            `${this.base}/api/sequences/${encodeURIComponent(seq)}` +
            `/frames/${frame}/images/${encodeURIComponent(camera)}`
        );
    }
}

const ASCII_HEADER = 'x y z intensity';

/**
 * Decode a point cloud payload into flat [x, y, z, intensity] float32
 * quadruples. Binary payloads are consecutive 16-byte little-endian records;
 * payloads starting with the header line "x y z intensity" are ASCII, one
 * point per line.
 */
export function parsePointCloud(buffer: ArrayBuffer): Float32Array {
    const bytes = new Uint8Array(buffer);
    const head = new TextDecoder('ascii', { fatal: false })
        .decode(bytes.subarray(0, 64))
        .trimStart();
    if (head.startsWith(ASCII_HEADER)) {
        const text = new TextDecoder('ascii').decode(bytes);
        const lines = text
            .split('\n')
            .map((l) => l.trim())
            .filter((l) => l.length > 0);
        const out = new Float32Array((lines.length - 1) * 4);
        for (let i = 1; i < lines.length; i++) {
            const parts = lines[i].split(/\s+/);
            for (let j = 0; j < 4; j++) {
                out[(i - 1) * 4 + j] = Number(parts[j]);
            }
        }
        return out;
    }
    if (bytes.length % 16 !== 0) {
        throw new Error(`truncated point cloud payload of ${bytes.length} bytes`);
    }
    return new Float32Array(buffer.slice(0));
}
