/**
 * Browser shell: layout, canvases and input wiring around the Editor.
 *
 * Regions, top to bottom: toolbar, panoramic camera strip (every camera at
 * once, height resizable by dragging its lower edge), then Masterview
 * (side / front / top stacked) beside the main bird's-eye viewport, then a
 * status line. All annotation logic lives in the DOM-free modules; this file
 * only draws state and forwards input.
 */
import { ApiClient } from './api.js';
import { DEFAULT_NEW_BOX, Editor } from './editor.js';
import { BoxPose, boxCorners, poseOfRow, projectBox, wrapYaw } from './geometry.js';
import {
    ROTATE_STEP_RAD,
    SCALE_STEP_M,
    TRANSLATE_STEP_M,
} from './keyboard.js';
import { framePane, panePoint, PANE_ORDER } from './masterview.js';
import { CameraDef } from './types.js';

const COLORS: Record<string, string> = {
    CAR: '#4cc9f0',
    PEDESTRIAN: '#f72585',
    MOTORCYCLE: '#ffd166',
    BICYCLE: '#90be6d',
    TRUCK: '#f8961e',
};

const HELP_ROWS: [string, string][] = [
    ['T / S / R', 'translate / scale / rotate mode'],
    ['Arrows', 'nudge x/y (0.1 m), dims (0.05 m) or yaw (2°)'],
    ['PageUp / PageDown', 'nudge z or height'],
    ['Escape', 'cancel the current gesture'],
    ['N', 'new box on this frame'],
    ['K', 'mark keyframe; second press interpolates the range'],
    [', / .', 'previous / next frame'],
    ['Tab', 'cycle selection'],
    ['Ctrl+Z / Ctrl+Y', 'undo / redo on the server'],
    ['X', 'export the annotation file'],
    ['H or ?', 'toggle this overlay'],
];

function el<K extends keyof HTMLElementTagNameMap>(
    tag: K,
    cls?: string,
    text?: string,
): HTMLElementTagNameMap[K] {
    const node = document.createElement(tag);
    if (cls) node.className = cls;
    if (text) node.textContent = text;
    return node;
}

class Shell {
    private readonly root: HTMLElement;
    private readonly strip: HTMLCanvasElement;
    private readonly master: HTMLCanvasElement;
    private readonly bev: HTMLCanvasElement;
    private readonly status: HTMLElement;
    private readonly help: HTMLElement;
    private readonly images = new Map<string, HTMLImageElement>();
    private readonly clouds = new Map<number, Float32Array>();
    private editor!: Editor;
    private drawQueued = false;
    private stripHeight = 180;
    // BEV view transform: metres -> pixels around a pan target.
    private bevScale = 12;
    private bevCenter: [number, number] = [8, 0];
    private drag:
        | { kind: 'pan'; lastX: number; lastY: number }
        | { kind: 'gesture'; lastX: number; lastY: number; pose: BoxPose; moved: boolean }
        | { kind: 'strip-resize'; lastY: number }
        | null = null;

    constructor(private readonly api: ApiClient) {
        this.root = document.getElementById('app')!;
        const toolbar = el('div', 'toolbar');
        this.strip = el('canvas', 'strip');
        const stripHandle = el('div', 'strip-handle');
        stripHandle.title = 'drag to resize the camera strip';
        const middle = el('div', 'middle');
        this.master = el('canvas', 'masterview');
        this.bev = el('canvas', 'bev');
        middle.append(this.master, this.bev);
        this.status = el('div', 'status', 'loading…');
        this.help = el('div', 'help hidden');
        this.root.append(toolbar, this.strip, stripHandle, middle, this.status, this.help);
        this.buildToolbar(toolbar);
        this.buildHelp();

        stripHandle.addEventListener('mousedown', (e) => {
            this.drag = { kind: 'strip-resize', lastY: e.clientY };
            e.preventDefault();
        });
        window.addEventListener('mousemove', (e) => this.onMove(e));
        window.addEventListener('mouseup', (e) => void this.onUp(e));
        this.bev.addEventListener('mousedown', (e) => this.onBevDown(e));
        this.bev.addEventListener('wheel', (e) => {
            this.bevScale *= e.deltaY < 0 ? 1.15 : 1 / 1.15;
            this.bevScale = Math.min(Math.max(this.bevScale, 1), 200);
            e.preventDefault();
            this.requestDraw();
        });
        window.addEventListener('resize', () => this.requestDraw());
        window.addEventListener('keydown', (e) => this.onKeyDown(e));
        window.addEventListener('keyup', (e) => void this.editor?.keyboard.keyUp({ key: e.key }));
    }

    async start(): Promise<void> {
        const sequences = await this.api.listSequences();
        if (sequences.length === 0) {
            this.status.textContent = 'no sequences on the server';
            return;
        }
        const seq = sequences[0].sequence_id;
        this.editor = await Editor.open(this.api, seq, {
            onStateChanged: () => this.requestDraw(),
            onFrameChanged: () => {
                void this.loadCloud();
                this.requestDraw();
            },
            onSelectionChanged: () => this.requestDraw(),
            onWarning: (m) => this.flash(m),
            onExport: (text) => this.offerDownload(text),
            onHelpToggled: (visible) => this.help.classList.toggle('hidden', !visible),
        });
        await this.loadCloud();
        this.requestDraw();
    }

    // -- input ---------------------------------------------------------------

    private onKeyDown(e: KeyboardEvent): void {
        if (!this.editor) return;
        const handled = [
            'ArrowUp', 'ArrowDown', 'ArrowLeft', 'ArrowRight', 'PageUp', 'PageDown', 'Tab',
        ];
        if (handled.includes(e.key) || (e.ctrlKey && 'zyZY'.includes(e.key))) {
            e.preventDefault();
        }
        void this.editor.keyboard.keyDown({ key: e.key, ctrl: e.ctrlKey, shift: e.shiftKey });
    }

    private bevToWorld(px: number, py: number): [number, number] {
        const r = this.bev.getBoundingClientRect();
        return [
            this.bevCenter[0] + (py - r.height / 2) / -this.bevScale,
            this.bevCenter[1] + (px - r.width / 2) / -this.bevScale,
        ];
    }

    private onBevDown(e: MouseEvent): void {
        if (!this.editor) return;
        const rect = this.bev.getBoundingClientRect();
        const px = e.clientX - rect.left;
        const py = e.clientY - rect.top;
        if (e.button === 1 || e.shiftKey) {
            this.drag = { kind: 'pan', lastX: px, lastY: py };
            e.preventDefault();
            return;
        }
        const [wx, wy] = this.bevToWorld(px, py);
        // Select the closest footprint center within 2 m, then start a gesture.
        let best: { track: number; d: number } | null = null;
        for (const row of this.editor.rows()) {
            const d = Math.hypot(row.center[0] - wx, row.center[1] - wy);
            if (d < 2 && (!best || d < best.d)) {
                best = { track: row.track_id, d };
            }
        }
        if (best && best.track !== this.editor.selection()) {
            this.editor.selectTrack(best.track);
        }
        const sel = this.editor.selected();
        if (sel && best) {
            this.drag = {
                kind: 'gesture',
                lastX: px,
                lastY: py,
                pose: { center: [...sel.pose.center], dims: [...sel.pose.dims], yaw: sel.pose.yaw },
                moved: false,
            };
        }
        e.preventDefault();
    }

    private onMove(e: MouseEvent): void {
        if (!this.drag) return;
        if (this.drag.kind === 'strip-resize') {
            this.stripHeight = Math.min(Math.max(this.stripHeight + e.clientY - this.drag.lastY, 60), 420);
            this.drag.lastY = e.clientY;
            this.requestDraw();
            return;
        }
        const rect = this.bev.getBoundingClientRect();
        const px = e.clientX - rect.left;
        const py = e.clientY - rect.top;
        const dxPix = px - this.drag.lastX;
        const dyPix = py - this.drag.lastY;
        this.drag.lastX = px;
        this.drag.lastY = py;
        if (this.drag.kind === 'pan') {
            this.bevCenter[0] += dyPix / this.bevScale;
            this.bevCenter[1] += dxPix / this.bevScale;
            this.requestDraw();
            return;
        }
        // Pointer gesture on the selected box; a plane drag edits two axes.
        const pose = this.drag.pose;
        const mode = this.editor.keyboard.mode;
        if (mode === 'translate') {
            pose.center[0] -= dyPix / this.bevScale;
            pose.center[1] -= dxPix / this.bevScale;
        } else if (mode === 'scale') {
            pose.dims[0] = Math.max(0.01, pose.dims[0] - (dyPix / this.bevScale) * 2);
            pose.dims[1] = Math.max(0.01, pose.dims[1] - (dxPix / this.bevScale) * 2);
        } else {
            pose.yaw = wrapYaw(pose.yaw - dxPix * 0.01);
        }
        this.drag.moved = true;
        this.editor.liveUpdate(pose);
    }

    private async onUp(_e: MouseEvent): Promise<void> {
        const drag = this.drag;
        this.drag = null;
        if (drag?.kind === 'gesture' && drag.moved) {
            // One edit op per gesture, committed on release.
            await this.editor.commitPose(drag.pose);
        }
    }

    // -- widgets ---------------------------------------------------------------

    private buildToolbar(bar: HTMLElement): void {
        const button = (label: string, title: string, fn: () => void) => {
            const b = el('button', undefined, label);
            b.title = title;
            b.addEventListener('click', () => {
                fn();
                this.requestDraw();
            });
            bar.append(b);
        };
        button('◀ prev', 'previous frame (,)', () => void this.editor?.stepFrame(-1));
        button('next ▶', 'next frame (.)', () => void this.editor?.stepFrame(1));
        button('new box', 'create a box (N)', () => void this.editor?.createBox());
        button('translate', 'translate mode (T)', () => void this.editor?.keyboard.keyDown({ key: 't' }));
        button('scale', 'scale mode (S)', () => void this.editor?.keyboard.keyDown({ key: 's' }));
        button('rotate', 'rotate mode (R)', () => void this.editor?.keyboard.keyDown({ key: 'r' }));
        button('mark', 'mark keyframe / interpolate (K)', () => void this.editor?.keyboard.keyDown({ key: 'k' }));
        button('undo', 'undo (Ctrl+Z)', () => void this.editor?.undo());
        button('redo', 'redo (Ctrl+Y)', () => void this.editor?.redo());
        button('select', 'cycle selection (Tab)', () => this.editor?.cycleSelection());
        button('export', 'download annotations (X)', () => void this.editor?.exportAll());
        button('help', 'keyboard map (H)', () => this.editor?.toggleHelp());
    }

    private buildHelp(): void {
        this.help.append(el('h2', undefined, 'keyboard map'));
        const table = el('table');
        for (const [keys, what] of HELP_ROWS) {
            const tr = el('tr');
            tr.append(el('td', 'key', keys), el('td', undefined, what));
            table.append(tr);
        }
        this.help.append(table);
        const steps = el('p', 'muted');
        steps.textContent =
            `steps: ${TRANSLATE_STEP_M} m translate, ${SCALE_STEP_M} m scale, ` +
            `${((ROTATE_STEP_RAD * 180) / Math.PI).toFixed(0)}° rotate; ` +
            `new boxes start as ${DEFAULT_NEW_BOX.className.toLowerCase()}`;
        this.help.append(steps);
    }

    private flash(message: string): void {
        this.status.classList.add('warn');
        this.renderStatus(message);
        setTimeout(() => {
            this.status.classList.remove('warn');
            this.renderStatus();
        }, 4000);
    }

    private offerDownload(text: string): void {
        const a = document.createElement('a');
        a.href = URL.createObjectURL(new Blob([text], { type: 'application/json' }));
        a.download = `${this.editor.state.sequenceId}-annotations.json`;
        a.click();
        URL.revokeObjectURL(a.href);
    }

    private async loadCloud(): Promise<void> {
        const frame = this.editor.currentFrame();
        if (this.clouds.has(frame)) return;
        try {
            this.clouds.set(frame, await this.api.pointcloud(this.editor.state.sequenceId, frame));
        } catch {
            this.clouds.set(frame, new Float32Array(0));
        }
        this.requestDraw();
    }

    private imageFor(camera: string): HTMLImageElement {
        const frame = this.editor.currentFrame();
        const key = `${frame}/${camera}`;
        let img = this.images.get(key);
        if (!img) {
            img = new Image();
            img.src = this.api.imageUrl(this.editor.state.sequenceId, frame, camera);
            img.addEventListener('load', () => this.requestDraw());
            this.images.set(key, img);
        }
        return img;
    }

    // -- rendering ---------------------------------------------------------------

    private requestDraw(): void {
        if (this.drawQueued) return;
        this.drawQueued = true;
        requestAnimationFrame(() => {
            this.drawQueued = false;
            this.draw();
        });
    }

    private renderStatus(extra?: string): void {
        if (!this.editor) return;
        const track = this.editor.selection();
        const pending = this.editor.keyboard.pendingRangeStart();
        const parts = [
            `frame ${this.editor.currentFrame() + 1}/${this.editor.state.frameCount}`,
            `mode ${this.editor.keyboard.mode}`,
            track === null ? 'nothing selected' : `track ${track}`,
        ];
        if (pending) parts.push(`range start: frame ${pending.frame}`);
        if (extra) parts.push(extra);
        this.status.textContent = parts.join(' · ');
    }

    private draw(): void {
        if (!this.editor) return;
        this.renderStatus();
        this.drawStrip();
        this.drawMasterview();
        this.drawBev();
    }

    private drawStrip(): void {
        const cams = this.editor.cameras;
        const height = this.stripHeight;
        const widths = cams.map((c) => (c.width / c.height) * height);
        const total = widths.reduce((a, b) => a + b, 0);
        this.strip.width = Math.max(1, Math.ceil(total));
        this.strip.height = height;
        this.strip.style.height = `${height}px`;
        const ctx = this.strip.getContext('2d')!;
        ctx.fillStyle = '#101418';
        ctx.fillRect(0, 0, this.strip.width, height);
        let x = 0;
        cams.forEach((cam, i) => {
            const w = widths[i];
            const img = this.imageFor(cam.name);
            if (img.complete && img.naturalWidth > 0) {
                ctx.drawImage(img, x, 0, w, height);
            }
            ctx.strokeStyle = '#2a3138';
            ctx.strokeRect(x + 0.5, 0.5, w - 1, height - 1);
            ctx.fillStyle = '#9aa7b0';
            ctx.font = '11px sans-serif';
            ctx.fillText(cam.name, x + 6, 14);
            this.drawStripOverlays(ctx, cam, x, w / cam.width, height / cam.height);
            x += w;
        });
    }

    private drawStripOverlays(
        ctx: CanvasRenderingContext2D,
        cam: CameraDef,
        offsetX: number,
        sx: number,
        sy: number,
    ): void {
        for (const row of this.editor.rows()) {
            const selected = row.track_id === this.editor.selection();
            const pose = selected ? this.editor.displayPose(row.track_id) ?? poseOfRow(row) : poseOfRow(row);
            // live poses come from the overlay cache for the selected track;
            // everyone else projects straight from the server row
            const entry =
                (selected && this.editor.overlays.get(row.track_id)?.entries.find((p) => p.camera === cam.name)) ||
                projectBox(cam, pose);
            if (!entry) continue;
            const ghost = this.editor.isGhost(this.editor.currentFrame(), row.track_id);
            ctx.lineWidth = selected ? 2 : 1;
            ctx.globalAlpha = ghost ? 0.45 : 1;
            ctx.strokeStyle = COLORS[row.class] ?? '#ffffff';
            ctx.strokeRect(
                offsetX + entry.rect.xmin * sx,
                entry.rect.ymin * sy,
                (entry.rect.xmax - entry.rect.xmin) * sx,
                (entry.rect.ymax - entry.rect.ymin) * sy,
            );
            ctx.globalAlpha = 1;
        }
    }

    private drawMasterview(): void {
        const width = 230;
        const paneH = 170;
        this.master.width = width;
        this.master.height = paneH * 3;
        const ctx = this.master.getContext('2d')!;
        ctx.fillStyle = '#11151a';
        ctx.fillRect(0, 0, width, paneH * 3);
        const track = this.editor.selection();
        const pose = track !== null ? this.editor.displayPose(track) : null;
        PANE_ORDER.forEach((pane, i) => {
            const top = i * paneH;
            ctx.save();
            ctx.translate(0, top);
            ctx.strokeStyle = '#2a3138';
            ctx.strokeRect(0.5, 0.5, width - 1, paneH - 1);
            ctx.fillStyle = '#9aa7b0';
            ctx.font = '11px sans-serif';
            ctx.fillText(pane, 6, 14);
            if (pose && track !== null) {
                const frame = framePane(pane, pose.dims, width, paneH);
                const cloud = this.clouds.get(this.editor.currentFrame());
                if (cloud) {
                    ctx.fillStyle = '#3d4854';
                    for (let p = 0; p < cloud.length; p += 4) {
                        const [u, v] = panePoint(frame, pose, [cloud[p], cloud[p + 1], cloud[p + 2]]);
                        if (u >= 0 && u < width && v >= 0 && v < paneH) {
                            ctx.fillRect(u, v, 1.5, 1.5);
                        }
                    }
                }
                const cls = this.editor.state.row(this.editor.currentFrame(), track)?.class;
                ctx.strokeStyle = COLORS[cls ?? 'CAR'] ?? '#ffffff';
                ctx.lineWidth = 1.5;
                const corners = boxCorners(pose).map((c) => panePoint(frame, pose, c));
                this.strokePathPairs(ctx, corners);
            }
            ctx.restore();
        });
    }

    private strokePathPairs(ctx: CanvasRenderingContext2D, pts: [number, number][]): void {
        const edges: [number, number][] = [
            [0, 1], [1, 2], [2, 3], [3, 0],
            [4, 5], [5, 6], [6, 7], [7, 4],
            [0, 4], [1, 5], [2, 6], [3, 7],
        ];
        ctx.beginPath();
        for (const [a, b] of edges) {
            ctx.moveTo(pts[a][0], pts[a][1]);
            ctx.lineTo(pts[b][0], pts[b][1]);
        }
        ctx.stroke();
    }

    private drawBev(): void {
        const rect = this.bev.parentElement!.getBoundingClientRect();
        const width = Math.max(1, Math.floor(rect.width - 240));
        const height = Math.max(1, Math.floor(rect.height));
        this.bev.width = width;
        this.bev.height = height;
        const ctx = this.bev.getContext('2d')!;
        ctx.fillStyle = '#0b0e11';
        ctx.fillRect(0, 0, width, height);
        const toPix = (x: number, y: number): [number, number] => [
            width / 2 - (y - this.bevCenter[1]) * this.bevScale,
            height / 2 - (x - this.bevCenter[0]) * this.bevScale,
        ];
        const cloud = this.clouds.get(this.editor.currentFrame());
        if (cloud) {
            ctx.fillStyle = '#46525e';
            for (let p = 0; p < cloud.length; p += 4) {
                const [u, v] = toPix(cloud[p], cloud[p + 1]);
                if (u >= 0 && u < width && v >= 0 && v < height) {
                    ctx.fillRect(u, v, 1.5, 1.5);
                }
            }
        }
        // Ego marker at the origin.
        const [ox, oy] = toPix(0, 0);
        ctx.strokeStyle = '#5c6b78';
        ctx.strokeRect(ox - 4, oy - 4, 8, 8);
        for (const row of this.editor.rows()) {
            const selected = row.track_id === this.editor.selection();
            const pose = selected ? this.editor.displayPose(row.track_id) ?? poseOfRow(row) : poseOfRow(row);
            const ghost = this.editor.isGhost(this.editor.currentFrame(), row.track_id);
            const corners = boxCorners(pose).slice(0, 4).map((c) => toPix(c[0], c[1]));
            ctx.globalAlpha = ghost ? 0.4 : 1;
            ctx.strokeStyle = COLORS[row.class] ?? '#ffffff';
            ctx.lineWidth = selected ? 2.5 : 1.2;
            ctx.beginPath();
            corners.forEach(([u, v], i) => (i === 0 ? ctx.moveTo(u, v) : ctx.lineTo(u, v)));
            ctx.closePath();
            ctx.stroke();
            // Heading tick from the center to the front edge midpoint.
            const head = toPix(
                pose.center[0] + Math.cos(pose.yaw) * pose.dims[0] * 0.5,
                pose.center[1] + Math.sin(pose.yaw) * pose.dims[0] * 0.5,
            );
            const mid = toPix(pose.center[0], pose.center[1]);
            ctx.beginPath();
            ctx.moveTo(mid[0], mid[1]);
            ctx.lineTo(head[0], head[1]);
            ctx.stroke();
            ctx.globalAlpha = 1;
        }
    }
}

const shell = new Shell(new ApiClient(''));
void shell.start();
