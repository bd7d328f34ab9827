/**
 * Session orchestrator shared by the browser shell and the tests.
 *
 * Owns the selection, the working overlay state and the network round
 * trips; the keyboard controller talks to it through the EditorPort
 * interface and the DOM layer observes it through EditorEvents. The editor
 * never mutates annotation rows locally: every change is a server round
 * trip whose response document replaces the cached frame.
 *
 * All mutating calls go through one promise chain, giving the in-order
 * delivery of edit acknowledgments the server's diff semantics assume.
 */
import { ApiClient, ApiError } from './api.js';
import { BoxPose, clonePose, poseOfRow, posesEqual } from './geometry.js';
import { EditorPort, KeyboardController } from './keyboard.js';
import { OverlayCache } from './overlay.js';
import { SessionState } from './state.js';
import { AnnotationRow, CameraDef, ClassName } from './types.js';

/** Pose given to a freshly created box, in front of the rig. */
export const DEFAULT_NEW_BOX: { pose: BoxPose; className: ClassName } = {
    pose: { center: [5, 0, 0.75], dims: [4, 2, 1.5], yaw: 0 },
    className: 'CAR',
};

export interface EditorEvents {
    /** Anything visible changed; repaint. */
    onStateChanged?(): void;
    onFrameChanged?(frame: number): void;
    onSelectionChanged?(track: number | null): void;
    onWarning?(message: string): void;
    onExport?(text: string): void;
    onHelpToggled?(visible: boolean): void;
}

export class Editor implements EditorPort {
    readonly keyboard: KeyboardController;
    readonly warnings: string[] = [];
    lastExport: string | null = null;
    helpVisible = false;

    private frame = 0;
    private selectedTrack: number | null = null;
    /** Last known pose per track, carried onto frames without a row. */
    private readonly carried = new Map<number, BoxPose>();
    /** Uncommitted gesture pose, drawn instead of the server row. */
    private livePose: BoxPose | null = null;
    /** Frames filled by interpolation, per track; rendered as ghosts. */
    private readonly ghosts = new Map<number, Set<number>>();
    private queue: Promise<unknown> = Promise.resolve();

    constructor(
        private readonly api: ApiClient,
        readonly state: SessionState,
        readonly overlays: OverlayCache,
        readonly cameras: readonly CameraDef[],
        private readonly events: EditorEvents = {},
    ) {
        this.keyboard = new KeyboardController(this);
    }

    /** Fetch the manifest, build the editor and load the first frame. */
    static async open(
        api: ApiClient,
        sequenceId: string,
        events: EditorEvents = {},
    ): Promise<Editor> {
        const manifest = await api.manifest(sequenceId);
        const editor = new Editor(
            api,
            new SessionState(manifest.sequence_id, manifest.frame_count),
            new OverlayCache(),
            manifest.cameras,
            events,
        );
        await editor.gotoFrame(0);
        return editor;
    }

    // -- read-side accessors -------------------------------------------------

    currentFrame(): number {
        return this.frame;
    }

    selection(): number | null {
        return this.selectedTrack;
    }

    rows(): AnnotationRow[] {
        return this.state.rowsOf(this.frame);
    }

    /** The pose to draw for a track on the current frame (gesture-aware). */
    displayPose(track: number): BoxPose | null {
        if (track === this.selectedTrack && this.livePose) {
            return this.livePose;
        }
        const row = this.state.row(this.frame, track);
        return row ? poseOfRow(row) : null;
    }

    isGhost(frame: number, track: number): boolean {
        return this.ghosts.get(track)?.has(frame) ?? false;
    }

    // -- EditorPort ------------------------------------------------------------

    selected(): { frame: number; track: number; pose: BoxPose; onFrame: boolean } | null {
        if (this.selectedTrack === null) {
            return null;
        }
        const row = this.state.row(this.frame, this.selectedTrack);
        if (row) {
            return {
                frame: this.frame,
                track: this.selectedTrack,
                pose: poseOfRow(row),
                onFrame: true,
            };
        }
        const pose = this.carried.get(this.selectedTrack);
        if (!pose) {
            return null;
        }
        return { frame: this.frame, track: this.selectedTrack, pose: clonePose(pose), onFrame: false };
    }

    liveUpdate(pose: BoxPose): void {
        if (this.selectedTrack === null) {
            return;
        }
        const row = this.state.row(this.frame, this.selectedTrack);
        this.livePose = row && posesEqual(pose, poseOfRow(row)) ? null : clonePose(pose);
        this.overlays.setLocal(this.selectedTrack, this.cameras, pose);
        this.events.onStateChanged?.();
    }

    commitPose(pose: BoxPose): Promise<void> {
        return this.chain(async () => {
            const track = this.selectedTrack;
            if (track === null) {
                return;
            }
            const frame = this.frame;
            const row: AnnotationRow = {
                frame,
                track_id: track,
                class: this.state.classOf(track) ?? DEFAULT_NEW_BOX.className,
                center: [...pose.center],
                dims: [...pose.dims],
                yaw: pose.yaw,
            };
            const rows = this.state.rowsOf(frame).filter((r) => r.track_id !== track);
            rows.push(row);
            try {
                const token = this.state.beginFrameLoad(frame);
                const doc = await this.api.putAnnotations(this.state.sequenceId, frame, rows);
                this.state.applyFrameDocument(frame, doc, token);
                this.livePose = null;
                this.ghosts.get(track)?.delete(frame);
                const committed = this.state.row(frame, track);
                if (committed) {
                    this.carried.set(track, poseOfRow(committed));
                }
                await this.reconcileOverlay(frame, track);
            } catch (err) {
                await this.rollBack(frame, track, err);
            }
            this.events.onStateChanged?.();
        });
    }

    createBox(): Promise<void> {
        return this.chain(async () => {
            const frame = this.frame;
            const before = new Set(this.state.trackIds(frame));
            const rows = [...this.state.rowsOf(frame)];
            rows.push({
                frame,
                track_id: -1,
                class: DEFAULT_NEW_BOX.className,
                center: [...DEFAULT_NEW_BOX.pose.center],
                dims: [...DEFAULT_NEW_BOX.pose.dims],
                yaw: DEFAULT_NEW_BOX.pose.yaw,
            });
            try {
                const token = this.state.beginFrameLoad(frame);
                const doc = await this.api.putAnnotations(this.state.sequenceId, frame, rows);
                this.state.applyFrameDocument(frame, doc, token);
                const created = this.state.trackIds(frame).filter((t) => !before.has(t));
                const track = created.length > 0 ? Math.max(...created) : null;
                if (track !== null) {
                    this.selectedTrack = track;
                    const row = this.state.row(frame, track);
                    if (row) {
                        this.carried.set(track, poseOfRow(row));
                    }
                    this.livePose = null;
                    await this.reconcileOverlay(frame, track);
                    this.events.onSelectionChanged?.(track);
                }
            } catch (err) {
                this.warnOf(err);
            }
            this.events.onStateChanged?.();
        });
    }

    interpolate(track: number, start: number, end: number): Promise<void> {
        return this.chain(async () => {
            try {
                await this.api.interpolate(this.state.sequenceId, track, start, end);
                const marks = this.ghosts.get(track) ?? new Set<number>();
                for (let f = start + 1; f < end; f++) {
                    marks.add(f);
                }
                this.ghosts.set(track, marks);
                for (let f = start + 1; f < end; f++) {
                    await this.refreshFrame(f);
                }
            } catch (err) {
                this.warnOf(err);
            }
            this.events.onStateChanged?.();
        });
    }

    undo(): Promise<void> {
        return this.historyStep('undo');
    }

    redo(): Promise<void> {
        return this.historyStep('redo');
    }

    exportAll(): Promise<void> {
        return this.chain(async () => {
            try {
                const text = await this.api.exportText(this.state.sequenceId);
                this.lastExport = text;
                this.events.onExport?.(text);
            } catch (err) {
                this.warnOf(err);
            }
        });
    }

    stepFrame(delta: number): Promise<void> {
        const target = Math.min(Math.max(this.frame + delta, 0), this.state.frameCount - 1);
        return this.gotoFrame(target);
    }

    gotoFrame(target: number): Promise<void> {
        return this.chain(async () => {
            if (target < 0 || target >= this.state.frameCount) {
                this.warn(`frame ${target} is out of range`);
                return;
            }
            try {
                await this.refreshFrame(target);
            } catch (err) {
                this.warnOf(err);
                return;
            }
            this.frame = target;
            this.livePose = null;
            this.keyboard.resetGesture();
            if (this.selectedTrack !== null) {
                const row = this.state.row(target, this.selectedTrack);
                if (row) {
                    this.carried.set(this.selectedTrack, poseOfRow(row));
                }
                await this.reconcileOverlay(target, this.selectedTrack);
            }
            this.events.onFrameChanged?.(target);
            this.events.onStateChanged?.();
        });
    }

    cycleSelection(): void {
        const ids = this.state.trackIds(this.frame);
        if (ids.length === 0) {
            this.selectedTrack = null;
            this.events.onSelectionChanged?.(null);
            return;
        }
        const current = this.selectedTrack;
        const at = current === null ? -1 : ids.indexOf(current);
        this.selectTrack(ids[(at + 1) % ids.length]);
    }

    selectTrack(track: number): void {
        this.selectedTrack = track;
        this.livePose = null;
        const row = this.state.row(this.frame, track);
        if (row) {
            this.carried.set(track, poseOfRow(row));
        }
        void this.chain(() => this.reconcileOverlay(this.frame, track));
        this.events.onSelectionChanged?.(track);
        this.events.onStateChanged?.();
    }

    toggleHelp(): void {
        this.helpVisible = !this.helpVisible;
        this.events.onHelpToggled?.(this.helpVisible);
    }

    warn(message: string): void {
        this.warnings.push(message);
        this.events.onWarning?.(message);
    }

    // -- internals -------------------------------------------------------------

    /** Serialize mutations so acknowledgments apply in request order. */
    private chain<T>(task: () => Promise<T>): Promise<T> {
        const next = this.queue.then(task, task);
        this.queue = next.then(
            () => undefined,
            () => undefined,
        );
        return next;
    }

    private warnOf(err: unknown): void {
        if (err instanceof ApiError) {
            this.warn(`${err.reason}: ${err.message}`);
        } else {
            this.warn(String(err));
        }
    }

    private async refreshFrame(frame: number): Promise<void> {
        const token = this.state.beginFrameLoad(frame);
        const doc = await this.api.annotations(this.state.sequenceId, frame);
        this.state.applyFrameDocument(frame, doc, token);
    }

    /** Replace a track's overlay with the server's projections. */
    private async reconcileOverlay(frame: number, track: number): Promise<void> {
        const row = this.state.row(frame, track);
        if (!row) {
            // No committed row here; preview the carried pose locally.
            const pose = this.carried.get(track);
            if (pose) {
                this.overlays.setLocal(track, this.cameras, pose);
            } else {
                this.overlays.drop(track);
            }
            return;
        }
        try {
            const doc = await this.api.projections(this.state.sequenceId, frame, track);
            this.overlays.reconcile(track, doc.projections);
        } catch (err) {
            this.warnOf(err);
        }
    }

    /** A rejected edit rolls the visual state back to server truth. */
    private async rollBack(frame: number, track: number, err: unknown): Promise<void> {
        this.warnOf(err);
        this.livePose = null;
        try {
            await this.refreshFrame(frame);
            const row = this.state.row(frame, track);
            if (row) {
                this.carried.set(track, poseOfRow(row));
            }
            await this.reconcileOverlay(frame, track);
        } catch {
            // refresh itself failed; the warning above already covers it
        }
    }

    private historyStep(direction: 'undo' | 'redo'): Promise<void> {
        return this.chain(async () => {
            try {
                const ack =
                    direction === 'undo'
                        ? await this.api.undo(this.state.sequenceId)
                        : await this.api.redo(this.state.sequenceId);
                if (!ack.applied) {
                    this.warn(`nothing to ${direction}`);
                    return;
                }
                if (ack.kind === 'InterpolateRange' || ack.kind === 'SetClass') {
                    // These touch more frames than the ack names.
                    for (const f of this.state.loadedFrames()) {
                        await this.refreshFrame(f);
                    }
                } else if (typeof ack.frame_index === 'number') {
                    await this.refreshFrame(ack.frame_index);
                }
                if (this.selectedTrack !== null) {
                    const row = this.state.row(this.frame, this.selectedTrack);
                    if (row) {
                        this.carried.set(this.selectedTrack, poseOfRow(row));
                    }
                    this.livePose = null;
                    await this.reconcileOverlay(this.frame, this.selectedTrack);
                }
            } catch (err) {
                this.warnOf(err);
            }
            this.events.onStateChanged?.();
        });
    }
}
