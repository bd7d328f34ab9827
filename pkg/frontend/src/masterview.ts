/**
 * Masterview: three orthographic close-ups of the selected box, stacked
 * side / front / top. Each pane frames the box with a fixed margin so the
 * user can judge dimension edits without touching the main viewport.
 *
 * Points are expressed in the box's own frame (yaw removed), which keeps the
 * selected box axis-aligned in every pane while neighbours rotate around it.
 */
import { BoxPose } from './geometry.js';

export type Pane = 'side' | 'front' | 'top';

export const PANE_ORDER: readonly Pane[] = ['side', 'front', 'top'];

/** The framed box spans 1/MASTERVIEW_MARGIN of the pane's limiting axis. */
export const MASTERVIEW_MARGIN = 1.5;

export interface PaneFrame {
    pane: Pane;
    /** Pixels per metre. */
    scale: number;
    width: number;
    height: number;
}

// Which box-local extents a pane spreads across (horizontal, vertical).
function paneExtents(pane: Pane, dims: [number, number, number]): [number, number] {
    switch (pane) {
        case 'side':
            return [dims[0], dims[2]];
        case 'front':
            return [dims[1], dims[2]];
        case 'top':
            return [dims[0], dims[1]];
    }
}

/**
 * Fit a pane to the selected box: the larger relative extent fills the pane
 * divided by the margin, the box stays centered.
 */
export function framePane(
    pane: Pane,
    dims: [number, number, number],
    width: number,
    height: number,
): PaneFrame {
    const [eh, ev] = paneExtents(pane, dims);
    const scale = Math.min(
        width / (MASTERVIEW_MARGIN * Math.max(eh, 1e-9)),
        height / (MASTERVIEW_MARGIN * Math.max(ev, 1e-9)),
    );
    return { pane, scale, width, height };
}

/**
 * Map a world point into pane pixels, given the selected box the pane is
 * framed on. +v is up in world terms, so pixel y is flipped.
 */
export function panePoint(
    frame: PaneFrame,
    selected: BoxPose,
    p: [number, number, number],
): [number, number] {
    const c = Math.cos(selected.yaw);
    const s = Math.sin(selected.yaw);
    const dx = p[0] - selected.center[0];
    const dy = p[1] - selected.center[1];
    const dz = p[2] - selected.center[2];
    const lx = c * dx + s * dy;
    const ly = -s * dx + c * dy;
    let u: number;
    let v: number;
    switch (frame.pane) {
        case 'side':
            u = lx;
            v = dz;
            break;
        case 'front':
            u = ly;
            v = dz;
            break;
        case 'top':
            u = lx;
            v = ly;
            break;
    }
    return [frame.width / 2 + u * frame.scale, frame.height / 2 - v * frame.scale];
}
