/**
 * Camera-strip overlay rectangles, one set per track.
 *
 * During a drag the client projects boxes itself so feedback stays at frame
 * rate; when an edit commits, the server's /projections response replaces
 * the local guess. The source flag records which of the two produced the
 * current entries, mostly so tests can assert the reconcile happened.
 */
import { BoxPose, projectBoxAll } from './geometry.js';
import { CameraDef, ProjectionEntry } from './types.js';

export type OverlaySource = 'local' | 'server';

export interface TrackOverlay {
    source: OverlaySource;
    entries: ProjectionEntry[];
}

export class OverlayCache {
    private readonly byTrack = new Map<number, TrackOverlay>();

    /** Re-project a track locally (drag feedback, uncommitted pose). */
    setLocal(track: number, cameras: readonly CameraDef[], pose: BoxPose): void {
        this.byTrack.set(track, { source: 'local', entries: projectBoxAll(cameras, pose) });
    }

    /** Install the server's projections after a commit. */
    reconcile(track: number, entries: ProjectionEntry[]): void {
        this.byTrack.set(track, { source: 'server', entries });
    }

    get(track: number): TrackOverlay | undefined {
        return this.byTrack.get(track);
    }

    drop(track: number): void {
        this.byTrack.delete(track);
    }

    clear(): void {
        this.byTrack.clear();
    }

    tracks(): number[] {
        return [...this.byTrack.keys()].sort((a, b) => a - b);
    }
}
