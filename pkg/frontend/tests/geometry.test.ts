import { describe, expect, it } from 'vitest';

import {
    BoxPose,
    boxCorners,
    interpolatePose,
    projectBox,
    projectPoint,
    wrapYaw,
    Z_NEAR,
} from '../src/geometry.js';
import { CameraDef } from '../src/types.js';

// Looks straight down +x from the origin; principal point at (500, 400).
const CAM: CameraDef = {
    name: 'ident',
    intrinsics: [1000, 0, 500, 0, 1000, 400, 0, 0, 1],
    rotation: [0, -1, 0, 0, 0, -1, 1, 0, 0],
    translation: [0, 0, 0],
    width: 1000,
    height: 800,
};

const pose = (
    center: [number, number, number],
    dims: [number, number, number] = [4, 2, 1.5],
    yaw = 0,
): BoxPose => ({ center, dims, yaw });

describe('wrapYaw', () => {
    it('maps to (-pi, pi] with pi kept and -pi flipped', () => {
        expect(wrapYaw(Math.PI)).toBe(Math.PI);
        expect(wrapYaw(-Math.PI)).toBe(Math.PI);
        expect(wrapYaw(0)).toBe(0);
        expect(wrapYaw(3 * Math.PI)).toBeCloseTo(Math.PI, 12);
        for (let k = -7; k <= 7; k++) {
            const a = 0.37 + k * 2 * Math.PI;
            expect(wrapYaw(a)).toBeCloseTo(0.37, 10);
        }
    });
});

describe('boxCorners', () => {
    it('walks the bottom face counter-clockwise then repeats on top', () => {
        const c = boxCorners(pose([10, -2, 1], [4, 2, 2], 0));
        expect(c[0]).toEqual([12, -1, 0]);
        expect(c[1]).toEqual([8, -1, 0]);
        expect(c[2]).toEqual([8, -3, 0]);
        expect(c[3]).toEqual([12, -3, 0]);
        for (let i = 0; i < 4; i++) {
            expect(c[i + 4][0]).toBe(c[i][0]);
            expect(c[i + 4][1]).toBe(c[i][1]);
            expect(c[i + 4][2]).toBe(2);
        }
    });

    it('rotates the footprint by yaw about the center', () => {
        const c = boxCorners(pose([0, 0, 0], [2, 2, 2], Math.PI / 2));
        // (+1, +1) local lands at (-1, +1) world after a quarter turn.
        expect(c[0][0]).toBeCloseTo(-1, 12);
        expect(c[0][1]).toBeCloseTo(1, 12);
    });
});

describe('projectPoint', () => {
    it('pins the optical axis to the principal point at any depth', () => {
        for (const depth of [0.2, 1, 57]) {
            expect(projectPoint(CAM, [depth, 0, 0])).toEqual([500, 400]);
        }
    });

    it('rejects points behind or grazing the near plane', () => {
        expect(projectPoint(CAM, [-5, 0, 0])).toBeNull();
        expect(projectPoint(CAM, [Z_NEAR, 0, 0])).toBeNull();
    });

    it('moves left in the image as the point moves along +y', () => {
        const [u] = projectPoint(CAM, [10, 1, 0])!;
        expect(u).toBeLessThan(500);
    });
});

describe('projectBox', () => {
    it('reports all 8 corners for a box in clear view', () => {
        const entry = projectBox(CAM, pose([12, 0, 0]))!;
        expect(entry.visible_corner_count).toBe(8);
        expect(entry.corners_px).toHaveLength(8);
        expect(entry.rect.xmin).toBeGreaterThanOrEqual(0);
        expect(entry.rect.xmax).toBeLessThanOrEqual(CAM.width);
        expect(entry.rect.xmin).toBeLessThan(entry.rect.xmax);
    });

    it('drops boxes entirely behind the camera', () => {
        expect(projectBox(CAM, pose([-12, 0, 0]))).toBeNull();
    });

    it('keeps a straddling box with fewer visible corners', () => {
        const entry = projectBox(CAM, pose([1, 0, 0], [4, 2, 1.5]))!;
        expect(entry.visible_corner_count).toBeGreaterThan(0);
        expect(entry.visible_corner_count).toBeLessThan(8);
    });

    it('drops boxes whose hull clips to zero area', () => {
        // Far off to the side: in front of the camera but outside the image.
        expect(projectBox(CAM, pose([10, 80, 0]))).toBeNull();
    });
});

describe('interpolatePose', () => {
    const a = pose([0, 0, 0], [4, 2, 1.5], 0.4);
    const b = pose([10, -6, 2], [5, 2.5, 2], -0.6);

    it('returns the endpoints exactly at t=0 and t=1', () => {
        expect(interpolatePose(a, b, 0)).toEqual(a);
        expect(interpolatePose(a, b, 1)).toEqual(b);
    });

    it('blends center and dims componentwise', () => {
        const mid = interpolatePose(a, b, 0.5);
        expect(mid.center).toEqual([5, -3, 1]);
        expect(mid.dims).toEqual([4.5, 2.25, 1.75]);
    });

    it('takes the short way across the pi seam', () => {
        const left = pose([0, 0, 0], [1, 1, 1], 3.0);
        const right = pose([0, 0, 0], [1, 1, 1], -3.0);
        const mid = interpolatePose(left, right, 0.5);
        expect(Math.abs(mid.yaw)).toBeCloseTo(Math.PI, 12);
    });
});
