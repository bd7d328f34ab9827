/**
 * Client-side mirror of one sequence's annotations.
 *
 * The server owns the truth; this cache only ever holds documents the server
 * returned. Frame loads race with navigation, so every load takes a token
 * and a response is dropped when a newer request for the same frame started
 * after it (a stale frame must never overwrite a newer one).
 */
import { AnnotationRow, FrameDocument } from './types.js';

export class SessionState {
    private readonly frames = new Map<number, AnnotationRow[]>();
    private readonly loadTokens = new Map<number, number>();
    private nextToken = 1;

    constructor(
        readonly sequenceId: string,
        readonly frameCount: number,
    ) {}

    /** Start a load for a frame; pass the token to applyFrameDocument. */
    beginFrameLoad(frame: number): number {
        const token = this.nextToken++;
        this.loadTokens.set(frame, token);
        return token;
    }

    /**
     * Install a server document. Returns false (and changes nothing) when a
     * newer load for the same frame was started after this one.
     */
    applyFrameDocument(frame: number, doc: FrameDocument, token?: number): boolean {
        if (token !== undefined && this.loadTokens.get(frame) !== token) {
            return false;
        }
        this.frames.set(
            frame,
            doc.annotations.map((row) => ({
                ...row,
                center: [...row.center],
                dims: [...row.dims],
            })),
        );
        return true;
    }

    isLoaded(frame: number): boolean {
        return this.frames.has(frame);
    }

    loadedFrames(): number[] {
        return [...this.frames.keys()].sort((a, b) => a - b);
    }

    rowsOf(frame: number): AnnotationRow[] {
        return this.frames.get(frame) ?? [];
    }

    row(frame: number, track: number): AnnotationRow | undefined {
        return this.rowsOf(frame).find((r) => r.track_id === track);
    }

    trackIds(frame: number): number[] {
        return this.rowsOf(frame)
            .map((r) => r.track_id)
            .sort((a, b) => a - b);
    }

    /** Class of a track, from any loaded frame that has it. */
    classOf(track: number): AnnotationRow['class'] | undefined {
        for (const rows of this.frames.values()) {
            const hit = rows.find((r) => r.track_id === track);
            if (hit) {
                return hit.class;
            }
        }
        return undefined;
    }

    /** Canonical JSON of everything loaded; equal snapshots mean equal scenes. */
    snapshot(): string {
        const frames: Record<string, AnnotationRow[]> = {};
        for (const index of [...this.frames.keys()].sort((a, b) => a - b)) {
            const rows = [...this.frames.get(index)!].sort((a, b) => a.track_id - b.track_id);
            if (rows.length > 0) {
                frames[String(index)] = rows;
            }
        }
        return JSON.stringify({ sequence_id: this.sequenceId, frames }, null, 2);
    }
}
