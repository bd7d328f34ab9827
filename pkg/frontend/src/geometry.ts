/**
 * Client-side box math: yaw wrapping, corner generation, pinhole projection,
 * pose interpolation.
 *
 * These functions intentionally repeat the server's scalar arithmetic in the
 * same evaluation order, so overlays drawn during a drag land on the same
 * pixels the server reports after the commit. IEEE doubles behave identically
 * on both sides; any drift here would show up as overlay jitter on release.
 */
import { AnnotationRow, CameraDef, ProjectionEntry, Rect } from './types.js';

const TWO_PI = 2 * Math.PI;

/** Depth (m) at or below which a point counts as behind the camera. */
export const Z_NEAR = 0.1;

/** Smallest allowed box dimension in metres. */
export const MIN_DIM = 0.01;

/** Normalize an angle to (-pi, pi]. */
export function wrapYaw(a: number): number {
    // JS % is fmod, so this matches the server formula exactly.
    let r = (a + Math.PI) % TWO_PI;
    if (r <= 0) {
        r += TWO_PI;
    }
    return r - Math.PI;
}

/** Mutable pose of one box while a gesture is in flight. */
export interface BoxPose {
    center: [number, number, number];
    dims: [number, number, number];
    yaw: number;
}

export function clonePose(p: BoxPose): BoxPose {
    return { center: [...p.center], dims: [...p.dims], yaw: p.yaw };
}

export function poseOfRow(row: AnnotationRow): BoxPose {
    return { center: [...row.center], dims: [...row.dims], yaw: row.yaw };
}

export function posesEqual(a: BoxPose, b: BoxPose): boolean {
    return (
        a.yaw === b.yaw &&
        a.center.every((v, i) => v === b.center[i]) &&
        a.dims.every((v, i) => v === b.dims[i])
    );
}

// Bottom face counter-clockwise from local (+x, +y), then the top face in
// the same xy order. Edge drawing and the server rely on this order.
const CORNER_SIGNS: readonly [number, number][] = [
    [1, 1],
    [-1, 1],
    [-1, -1],
    [1, -1],
];

/** The 8 box vertices, bottom face first. */
export function boxCorners(pose: BoxPose): [number, number, number][] {
    const c = Math.cos(pose.yaw);
    const s = Math.sin(pose.yaw);
    const hx = pose.dims[0] * 0.5;
    const hy = pose.dims[1] * 0.5;
    const hz = pose.dims[2] * 0.5;
    const out: [number, number, number][] = new Array(8);
    for (let i = 0; i < 4; i++) {
        const [sx, sy] = CORNER_SIGNS[i];
        const lx = sx * hx;
        const ly = sy * hy;
        const x = pose.center[0] + c * lx - s * ly;
        const y = pose.center[1] + s * lx + c * ly;
        out[i] = [x, y, pose.center[2] - hz];
        out[i + 4] = [x, y, pose.center[2] + hz];
    }
    return out;
}

/** Pairs of corner indices forming the 12 box edges. */
export const BOX_EDGES: readonly [number, number][] = [
    [0, 1], [1, 2], [2, 3], [3, 0],
    [4, 5], [5, 6], [6, 7], [7, 4],
    [0, 4], [1, 5], [2, 6], [3, 7],
];

function toCamera(cam: CameraDef, x: number, y: number, z: number): [number, number, number] {
    const r = cam.rotation;
    const t = cam.translation;
    const xc = r[0] * x + r[1] * y + r[2] * z + t[0];
    const yc = r[3] * x + r[4] * y + r[5] * z + t[1];
    const zc = r[6] * x + r[7] * y + r[8] * z + t[2];
    return [xc, yc, zc];
}

function toPixel(cam: CameraDef, xc: number, yc: number, zc: number): [number, number] {
    const k = cam.intrinsics;
    const u = (k[0] * xc + k[1] * yc) / zc + k[2];
    const v = (k[4] * yc) / zc + k[5];
    return [u, v];
}

/** Pixel position of a world point, or null when behind the camera. */
export function projectPoint(
    cam: CameraDef,
    p: [number, number, number],
): [number, number] | null {
    const [xc, yc, zc] = toCamera(cam, p[0], p[1], p[2]);
    if (zc <= Z_NEAR) {
        return null;
    }
    return toPixel(cam, xc, yc, zc);
}

/**
 * Project a box into one camera. Corners behind the near plane are dropped,
 * the rest form an axis-aligned hull clipped to the image; no visible corner
 * or a zero-area clipped hull means the box is not visible and yields null.
 */
export function projectBox(cam: CameraDef, pose: BoxPose): ProjectionEntry | null {
    const corners = boxCorners(pose);
    const pts: [number, number][] = [];
    for (let i = 0; i < 8; i++) {
        const [xc, yc, zc] = toCamera(cam, corners[i][0], corners[i][1], corners[i][2]);
        if (zc > Z_NEAR) {
            pts.push(toPixel(cam, xc, yc, zc));
        }
    }
    if (pts.length === 0) {
        return null;
    }
    let xmin = Infinity;
    let xmax = -Infinity;
    let ymin = Infinity;
    let ymax = -Infinity;
    for (const [u, v] of pts) {
        xmin = Math.min(xmin, u);
        xmax = Math.max(xmax, u);
        ymin = Math.min(ymin, v);
        ymax = Math.max(ymax, v);
    }
    const w = cam.width;
    const h = cam.height;
    const rect: Rect = {
        xmin: Math.min(Math.max(xmin, 0), w),
        ymin: Math.min(Math.max(ymin, 0), h),
        xmax: Math.min(Math.max(xmax, 0), w),
        ymax: Math.min(Math.max(ymax, 0), h),
    };
    if (rect.xmax - rect.xmin <= 0 || rect.ymax - rect.ymin <= 0) {
        return null;
    }
    return {
        camera: cam.name,
        rect,
        corners_px: pts,
        visible_corner_count: pts.length,
    };
}

/** Project a box into every camera it is visible in. */
export function projectBoxAll(cameras: readonly CameraDef[], pose: BoxPose): ProjectionEntry[] {
    const out: ProjectionEntry[] = [];
    for (const cam of cameras) {
        const entry = projectBox(cam, pose);
        if (entry !== null) {
            out.push(entry);
        }
    }
    return out;
}

/**
 * Blend two poses at parameter t in [0, 1]: center and dims componentwise
 * affine, yaw along the shortest arc, endpoints returned exactly.
 */
export function interpolatePose(start: BoxPose, end: BoxPose, t: number): BoxPose {
    if (t === 0) {
        return clonePose(start);
    }
    if (t === 1) {
        return clonePose(end);
    }
    const u = 1 - t;
    return {
        center: [
            u * start.center[0] + t * end.center[0],
            u * start.center[1] + t * end.center[1],
            u * start.center[2] + t * end.center[2],
        ],
        dims: [
            Math.max(MIN_DIM, u * start.dims[0] + t * end.dims[0]),
            Math.max(MIN_DIM, u * start.dims[1] + t * end.dims[1]),
            Math.max(MIN_DIM, u * start.dims[2] + t * end.dims[2]),
        ],
        yaw: wrapYaw(start.yaw + t * wrapYaw(end.yaw - start.yaw)),
    };
}
