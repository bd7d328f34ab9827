/** Wire formats exchanged with the annotation server. */

export type ClassName = 'CAR' | 'PEDESTRIAN' | 'MOTORCYCLE' | 'BICYCLE' | 'TRUCK';

export const CLASS_NAMES: readonly ClassName[] = [
    'CAR',
    'PEDESTRIAN',
    'MOTORCYCLE',
    'BICYCLE',
    'TRUCK',
];

export interface AnnotationRow {
    frame: number;
    track_id: number;
    class: ClassName;
    center: [number, number, number];
    dims: [number, number, number];
    yaw: number;
}

export interface FrameDocument {
    format_version: number;
    sequence_id: string;
    annotations: AnnotationRow[];
}

export interface CameraDef {
    name: string;
    /** Row-major 3x3 intrinsics. */
    intrinsics: number[];
    /** Row-major 3x3 world-to-camera rotation. */
    rotation: number[];
    translation: [number, number, number];
    width: number;
    height: number;
}

export interface FrameEntry {
    index: number;
    timestamp: number;
    pointcloud: string;
    images: Record<string, string>;
}

export interface Manifest {
    sequence_id: string;
    frame_count: number;
    cameras: CameraDef[];
    frames: FrameEntry[];
}

export interface SequenceInfo {
    sequence_id: string;
    frame_count: number;
    cameras: string[];
}

export interface Rect {
    xmin: number;
    ymin: number;
    xmax: number;
    ymax: number;
}

export interface ProjectionEntry {
    camera: string;
    rect: Rect;
    corners_px: [number, number][];
    visible_corner_count: number;
}

export interface ProjectionsDocument {
    frame: number;
    track_id: number;
    projections: ProjectionEntry[];
}

export interface HistoryAck {
    applied: boolean;
    kind: string | null;
    frame_index?: number;
    track_id?: number;
}

export interface InterpolateAck {
    track_id: number;
    start: number;
    end: number;
    written: number;
}
