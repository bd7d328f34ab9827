/**
 * Keyboard-first editing: mode switches, arrow-key nudges, gesture commits.
 *
 * A gesture is a run of arrow/page presses between mode entry and the last
 * key release. Every press mutates a local working pose (drawn immediately,
 * never sent), and the release that empties the held-key set commits the
 * accumulated change as one edit. Three presses of ArrowUp in translate mode
 * therefore produce exactly one server op of +0.3 m, not three of +0.1 m.
 */
import { BoxPose, clonePose, posesEqual, wrapYaw, MIN_DIM } from './geometry.js';

export type Mode = 'translate' | 'scale' | 'rotate';

export const TRANSLATE_STEP_M = 0.1;
export const SCALE_STEP_M = 0.05;
export const ROTATE_STEP_RAD = (2 * Math.PI) / 180;

/** A key event reduced to what the controller cares about. */
export interface KeyStroke {
    key: string;
    ctrl?: boolean;
    shift?: boolean;
}

/** What the controller needs from the surrounding editor. */
export interface EditorPort {
    /** Current selection, or null. onFrame: the track has a row on this frame. */
    selected(): { frame: number; track: number; pose: BoxPose; onFrame: boolean } | null;
    /** Uncommitted working pose changed; redraw overlays from it. */
    liveUpdate(pose: BoxPose): void;
    /** Commit a pose for the selected track on the current frame (one PUT). */
    commitPose(pose: BoxPose): Promise<void>;
    createBox(): Promise<void>;
    interpolate(track: number, start: number, end: number): Promise<void>;
    undo(): Promise<void>;
    redo(): Promise<void>;
    exportAll(): Promise<void>;
    stepFrame(delta: number): Promise<void>;
    cycleSelection(): void;
    toggleHelp(): void;
    warn(message: string): void;
}

const GESTURE_KEYS = new Set([
    'ArrowUp',
    'ArrowDown',
    'ArrowLeft',
    'ArrowRight',
    'PageUp',
    'PageDown',
]);

export class KeyboardController {
    mode: Mode = 'translate';

    private working: BoxPose | null = null;
    private dirty = false;
    private readonly held = new Set<string>();
    private pendingStart: { track: number; frame: number } | null = null;

    constructor(private readonly port: EditorPort) {}

    /** The pose mid-gesture, for rendering; null when nothing is in flight. */
    workingPose(): BoxPose | null {
        return this.dirty && this.working ? this.working : null;
    }

    gestureActive(): boolean {
        return this.dirty;
    }

    pendingRangeStart(): { track: number; frame: number } | null {
        return this.pendingStart;
    }

    /** Selection or frame changed underneath us; drop any working pose. */
    resetGesture(): void {
        this.working = null;
        this.dirty = false;
        this.held.clear();
    }

    async keyDown(stroke: KeyStroke): Promise<void> {
        const key = stroke.key;
        if (stroke.ctrl) {
            if (key === 'z' || key === 'Z') {
                await this.flushGesture();
                await (stroke.shift ? this.port.redo() : this.port.undo());
            } else if (key === 'y' || key === 'Y') {
                await this.flushGesture();
                await this.port.redo();
            }
            return;
        }
        if (GESTURE_KEYS.has(key)) {
            this.applyStep(key);
            return;
        }
        switch (key.length === 1 ? key.toLowerCase() : key) {
            case 't':
                await this.flushGesture();
                this.mode = 'translate';
                return;
            case 's':
                await this.flushGesture();
                this.mode = 'scale';
                return;
            case 'r':
                await this.flushGesture();
                this.mode = 'rotate';
                return;
            case 'n':
                await this.flushGesture();
                await this.port.createBox();
                return;
            case 'k':
                await this.markRange();
                return;
            case ',':
                await this.flushGesture();
                await this.port.stepFrame(-1);
                return;
            case '.':
                await this.flushGesture();
                await this.port.stepFrame(1);
                return;
            case 'x':
                await this.flushGesture();
                await this.port.exportAll();
                return;
            case 'h':
            case '?':
                this.port.toggleHelp();
                return;
            case 'Tab':
                await this.flushGesture();
                this.port.cycleSelection();
                return;
            case 'Escape':
                this.cancelGesture();
                return;
            default:
                return;
        }
    }

    async keyUp(stroke: KeyStroke): Promise<void> {
        if (!GESTURE_KEYS.has(stroke.key)) {
            return;
        }
        this.held.delete(stroke.key);
        if (this.held.size === 0) {
            await this.flushGesture();
        }
    }

    // -- gesture mechanics --------------------------------------------------

    private applyStep(key: string): void {
        const sel = this.port.selected();
        if (!sel) {
            this.port.warn('select a box first (Tab cycles, N creates)');
            return;
        }
        if (!this.working) {
            this.working = clonePose(sel.pose);
        }
        const p = this.working;
        switch (this.mode) {
            case 'translate': {
                const s = TRANSLATE_STEP_M;
                if (key === 'ArrowUp') p.center[0] += s;
                else if (key === 'ArrowDown') p.center[0] -= s;
                else if (key === 'ArrowLeft') p.center[1] += s;
                else if (key === 'ArrowRight') p.center[1] -= s;
                else if (key === 'PageUp') p.center[2] += s;
                else p.center[2] -= s;
                break;
            }
            case 'scale': {
                const s = SCALE_STEP_M;
                const grow = (i: number, by: number) => {
                    p.dims[i] = Math.max(MIN_DIM, p.dims[i] + by);
                };
                if (key === 'ArrowUp') grow(0, s);
                else if (key === 'ArrowDown') grow(0, -s);
                else if (key === 'ArrowLeft') grow(1, s);
                else if (key === 'ArrowRight') grow(1, -s);
                else if (key === 'PageUp') grow(2, s);
                else grow(2, -s);
                break;
            }
            case 'rotate': {
                if (key === 'ArrowLeft') p.yaw = wrapYaw(p.yaw + ROTATE_STEP_RAD);
                else if (key === 'ArrowRight') p.yaw = wrapYaw(p.yaw - ROTATE_STEP_RAD);
                else return; // up/down have no rotate meaning; not a gesture
                break;
            }
        }
        this.dirty = true;
        this.held.add(key);
        this.port.liveUpdate(p);
    }

    /** Commit the working pose if it changed; exactly one PUT per gesture. */
    private async flushGesture(): Promise<void> {
        if (!this.dirty || !this.working) {
            return;
        }
        const pose = this.working;
        this.working = null;
        this.dirty = false;
        this.held.clear();
        const sel = this.port.selected();
        if (sel && posesEqual(pose, sel.pose) && sel.onFrame) {
            return; // nudged back to where it started; nothing to say
        }
        await this.port.commitPose(pose);
    }

    /** Escape: abandon the gesture, snap back to the server pose. */
    private cancelGesture(): void {
        const hadGesture = this.dirty;
        this.working = null;
        this.dirty = false;
        this.held.clear();
        const sel = this.port.selected();
        if (hadGesture && sel) {
            this.port.liveUpdate(sel.pose);
        }
    }

    // -- interpolation marks --------------------------------------------------

    /**
     * First press marks the start keyframe, second fires the interpolation.
     * Same-frame double marks and end <= start are warned and send nothing.
     */
    private async markRange(): Promise<void> {
        await this.flushGesture();
        const sel = this.port.selected();
        if (!sel) {
            this.port.warn('select a box before marking an interpolation range');
            return;
        }
        if (!sel.onFrame) {
            // An endpoint needs an explicitly placed box on this frame.
            await this.port.commitPose(sel.pose);
        }
        if (!this.pendingStart) {
            this.pendingStart = { track: sel.track, frame: sel.frame };
            return;
        }
        if (this.pendingStart.track !== sel.track) {
            this.port.warn(
                `selection changed; interpolation restarts at frame ${sel.frame}`,
            );
            this.pendingStart = { track: sel.track, frame: sel.frame };
            return;
        }
        if (sel.frame === this.pendingStart.frame) {
            this.port.warn(`frame ${sel.frame} is already the marked start keyframe`);
            return;
        }
        if (sel.frame < this.pendingStart.frame) {
            this.port.warn(
                `end keyframe must come after frame ${this.pendingStart.frame}`,
            );
            return;
        }
        const { track, frame } = this.pendingStart;
        await this.port.interpolate(track, frame, sel.frame);
        this.pendingStart = null;
    }
}
